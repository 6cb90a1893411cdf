//! Skew products `P(θ⁰, θ¹) = (θ⁰ + ρ, θ¹ + n₀θ⁰ + χ(θ⁰))` over circle
//! rotations, circle-map rotation numbers and conjugacy checks.

use serde::{Deserialize, Serialize};

use crate::cohomology::solve_map;
use crate::diophantine::FrequencyVector;
use crate::error::{Error, Result};
use crate::fourier::{grid_points, sample_on_grid, FourierSeries, GridFunction};
use crate::lattice::{circle_distance, frac};
use crate::parabolic::ParabolicAffineMap;

/// Grid on which lift monotonicity is checked.
pub const MONOTONICITY_GRID: usize = 4096;
/// Side of the square grid for the linearization residual.
pub const LINEARIZATION_GRID: usize = 256;

/// A degree-one circle map with lift `F(x) = x + p(x)`, `p` periodic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FourierSeries", into = "FourierSeries")]
pub struct CircleMap {
    perturbation: FourierSeries,
}

impl TryFrom<FourierSeries> for CircleMap {
    type Error = Error;
    fn try_from(p: FourierSeries) -> Result<Self> {
        CircleMap::new(p)
    }
}

impl From<CircleMap> for FourierSeries {
    fn from(g: CircleMap) -> Self {
        g.perturbation
    }
}

impl CircleMap {
    pub fn new(perturbation: FourierSeries) -> Result<Self> {
        if perturbation.dim() != 1 || !perturbation.is_real() {
            return Err(Error::domain("the lift perturbation must be a real series on T¹"));
        }
        let g = CircleMap { perturbation };
        let derivative = g.perturbation.partial(0);
        for j in 0..MONOTONICITY_GRID {
            let x = j as f64 / MONOTONICITY_GRID as f64;
            let slope = 1.0 + derivative.evaluate(&[x])?;
            if slope <= 0.0 {
                return Err(Error::InvalidLift(format!("lift derivative {slope} at x = {x}")));
            }
        }
        Ok(g)
    }

    pub fn rotation(rho: f64) -> Self {
        CircleMap {
            perturbation: FourierSeries::constant(1, rho),
        }
    }

    pub fn perturbation(&self) -> &FourierSeries {
        &self.perturbation
    }

    pub fn lift(&self, x: f64) -> f64 {
        x + self.perturbation.evaluate_complex(&[x]).re
    }

    pub fn rotation_number(&self, n: u64) -> Result<RotationEstimate> {
        rotation_number_of(|x| self.lift(x), n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationEstimate {
    pub rho_hat: f64,
    pub error_bound: f64,
}

/// `(Fⁿ(0) - 0)/n` for any lift `F`, with error bound `1/n`. The orbits of `0`,
/// `1/2` and `1` are carried along; a lift that reorders them is not monotone.
pub fn rotation_number_of(lift: impl Fn(f64) -> f64, n: u64) -> Result<RotationEstimate> {
    if n < 100 {
        return Err(Error::domain("rotation number needs n >= 100"));
    }
    let (mut x, mut y, mut z) = (0.0, 0.5, 1.0);
    for step in 1..=n {
        x = lift(x);
        y = lift(y);
        z = lift(z);
        if !(x < y && y < z) || !x.is_finite() {
            return Err(Error::InvalidLift(format!(
                "orbits of 0, 1/2, 1 out of order at step {step}"
            )));
        }
        if ((z - x) - 1.0).abs() > 1e-6 * (1.0 + x.abs()) {
            return Err(Error::InvalidLift(format!(
                "F(x + 1) != F(x) + 1 along the orbit at step {step}"
            )));
        }
    }
    Ok(RotationEstimate {
        rho_hat: x / n as f64,
        error_bound: 1.0 / n as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewProductMap {
    pub rho: f64,
    pub n0: i64,
    pub chi: FourierSeries,
}

impl SkewProductMap {
    pub fn new(rho: f64, n0: i64, chi: FourierSeries) -> Result<Self> {
        if chi.dim() != 1 || !chi.is_real() {
            return Err(Error::domain("chi must be a real series on T¹"));
        }
        if !rho.is_finite() {
            return Err(Error::domain("rho must be finite"));
        }
        Ok(SkewProductMap { rho, n0, chi })
    }

    pub fn apply(&self, theta: [f64; 2]) -> Result<[f64; 2]> {
        let chi = self.chi.evaluate(&[theta[0]])?;
        Ok([
            frac(theta[0] + self.rho),
            frac(theta[1] + self.n0 as f64 * theta[0] + chi),
        ])
    }

    /// Solves `ζ(x + ρ) - ζ(x) = χ(x) - β` with `β = χ̂₀`. The fiber shift
    /// `f(θ) = (θ⁰, θ¹ + ζ(θ⁰))` then satisfies `f⁻¹∘P∘f = B` for the parabolic
    /// affine map `B = (n₀, ρ, β)`.
    pub fn linearize(&self, divisor_floor: f64) -> Result<Linearization> {
        let rho = FrequencyVector::new(vec![self.rho])?;
        let sol = solve_map(&self.chi, &rho, divisor_floor)?.into_complete()?;
        let affine = ParabolicAffineMap::new(self.n0, self.rho, sol.c)?;
        let zeta = sol.u;
        let mut residual: f64 = 0.0;
        for theta in grid_points(&[LINEARIZATION_GRID, LINEARIZATION_GRID]) {
            let shifted = [theta[0], theta[1] + zeta.evaluate(&[theta[0]])?];
            let moved = self.apply(shifted)?;
            let back = [moved[0], moved[1] - zeta.evaluate(&[moved[0]])?];
            let target = affine.apply([theta[0], theta[1]]);
            residual = residual
                .max(circle_distance(back[0], target[0]))
                .max(circle_distance(back[1], target[1]));
        }
        Ok(Linearization {
            zeta,
            beta: sol.c,
            residual,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub zeta: FourierSeries,
    pub beta: f64,
    /// Max distance between the conjugated map and the affine model on the grid.
    pub residual: f64,
}

/// For `f(θ) = θ + u(θ)`, checks `Df(X) = α` on the grid, where
/// `Df(X)ᵢ = Xᵢ + Σⱼ Xⱼ ∂ⱼuᵢ`. Returns `max |Df(X)ᵢ - αᵢ|`.
pub fn verify_constant_conjugacy(
    field: &[GridFunction],
    displacements: &[FourierSeries],
    alpha: &FrequencyVector,
) -> Result<f64> {
    let d = alpha.dim();
    if field.len() != d || displacements.len() != d {
        return Err(Error::domain(format!(
            "need {d} field components and {d} displacements, got {} and {}",
            field.len(),
            displacements.len()
        )));
    }
    let sizes = field[0].sizes().to_vec();
    if sizes.len() != d || field.iter().any(|g| g.sizes() != sizes.as_slice()) {
        return Err(Error::domain("field components must share one grid on T^d"));
    }
    if displacements.iter().any(|u| u.dim() != d || !u.is_real()) {
        return Err(Error::domain("displacements must be real series on T^d"));
    }
    let mut gradients = Vec::with_capacity(d * d);
    for u in displacements {
        for j in 0..d {
            gradients.push(sample_on_grid(&u.partial(j), &sizes)?);
        }
    }
    let points = field[0].samples().len();
    let mut worst: f64 = 0.0;
    for p in 0..points {
        for i in 0..d {
            let mut image = field[i].samples()[p];
            for j in 0..d {
                image += field[j].samples()[p] * gradients[i * d + j].samples()[p];
            }
            worst = worst.max((image - alpha.components()[i]).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::DEFAULT_DIVISOR_FLOOR;
    use approx::assert_abs_diff_eq;
    use nalgebra::{Matrix2, Vector2};
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn rigid_and_rational_rotations() {
        for rho in [0.25, PHI - 1.0, 0.9] {
            let r = CircleMap::rotation(rho).rotation_number(1000).unwrap();
            assert_abs_diff_eq!(r.rho_hat, rho, epsilon = 1e-13);
            assert_eq!(r.error_bound, 1e-3);
        }
        let r = CircleMap::rotation(3.0 / 7.0).rotation_number(700).unwrap();
        assert_abs_diff_eq!(r.rho_hat, 3.0 / 7.0, epsilon = 1e-14);
        assert!(CircleMap::rotation(0.1).rotation_number(10).is_err());
    }

    /// `h(x) = x + ε sin(2πx) / 2π` and its inverse by Newton's method.
    fn h(x: f64, eps: f64) -> f64 {
        x + eps * (TAU * x).sin() / TAU
    }

    fn h_inv(y: f64, eps: f64) -> f64 {
        let mut x = y;
        for _ in 0..50 {
            let step = (h(x, eps) - y) / (1.0 + eps * (TAU * x).cos());
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        x
    }

    #[test]
    fn conjugated_rotation() {
        let rho = PHI - 1.0;
        let n = 5000;
        let r = rotation_number_of(|x| h_inv(h(x, 0.4) + rho, 0.4), n).unwrap();
        assert!((r.rho_hat - rho).abs() <= r.error_bound);
    }

    #[test]
    fn non_monotone_lift_is_rejected() {
        let p = FourierSeries::sine(&[1], 0.5);
        assert!(matches!(CircleMap::new(p), Err(Error::InvalidLift(_))));
        let folded = |x: f64| x + 0.3 + 0.4 * (TAU * x).sin();
        assert!(matches!(rotation_number_of(folded, 200), Err(Error::InvalidLift(_))));
        let smooth = CircleMap::new(FourierSeries::sine(&[1], 0.1).shifted_by_constant(0.3)).unwrap();
        assert!(smooth.rotation_number(200).is_ok());
    }

    #[test]
    fn apply_examples() {
        let rho = PHI - 1.0;
        for beta in [0.0, 0.37] {
            let p = SkewProductMap::new(rho, 2, FourierSeries::constant(1, beta)).unwrap();
            let b = ParabolicAffineMap::new(2, rho, beta).unwrap();
            let theta = [0.31, 0.82];
            let (x, y) = (p.apply(theta).unwrap(), b.apply(theta));
            assert!(circle_distance(x[0], y[0]) < 1e-15 && circle_distance(x[1], y[1]) < 1e-15);
        }
        let p = SkewProductMap::new(rho, 1, FourierSeries::cosine(&[1], 1.0)).unwrap();
        let q = p.apply([0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(q[0], rho, epsilon = 1e-15);
        assert!(circle_distance(q[1], 0.0) < 1e-15);
    }

    #[test]
    fn linearize_examples() {
        let rho = PHI - 1.0;
        let p = SkewProductMap::new(rho, 1, FourierSeries::constant(1, 0.3)).unwrap();
        let lin = p.linearize(DEFAULT_DIVISOR_FLOOR).unwrap();
        assert!(lin.zeta.is_empty());
        assert_eq!((lin.beta, lin.residual), (0.3, 0.0));

        let zeta0 = FourierSeries::cosine(&[1], 0.4).plus(&FourierSeries::sine(&[3], 0.1)).unwrap();
        let chi = zeta0.translate(&[rho]).minus(&zeta0).unwrap().shifted_by_constant(0.25);
        let p = SkewProductMap::new(rho, 2, chi).unwrap();
        let lin = p.linearize(DEFAULT_DIVISOR_FLOOR).unwrap();
        assert!(lin.zeta.max_coefficient_distance(&zeta0) < 1e-13);
        assert_abs_diff_eq!(lin.beta, 0.25, epsilon = 1e-15);
        assert!(lin.residual <= 1e-10, "{}", lin.residual);

        let p = SkewProductMap::new(0.5, 1, FourierSeries::cosine(&[2], 1.0)).unwrap();
        assert!(matches!(p.linearize(DEFAULT_DIVISOR_FLOOR), Err(Error::Obstructed { .. })));
    }

    fn constant_field(alpha: &[f64], sizes: &[usize]) -> Vec<GridFunction> {
        alpha
            .iter()
            .map(|&a| GridFunction::from_fn(sizes.to_vec(), |_| a).unwrap())
            .collect()
    }

    #[test]
    fn conjugacy_examples() {
        let alpha = FrequencyVector::new(vec![1.0, PHI]).unwrap();
        let sizes = [32, 32];
        let field = constant_field(alpha.components(), &sizes);
        let identity = vec![FourierSeries::zero(2), FourierSeries::zero(2)];
        assert_eq!(verify_constant_conjugacy(&field, &identity, &alpha).unwrap(), 0.0);

        let u = vec![FourierSeries::cosine(&[1, 1], 0.05), FourierSeries::sine(&[0, 1], 0.02)];
        let expected = u
            .iter()
            .map(|ui| sample_on_grid(&ui.directional_derivative(alpha.components()), &sizes).unwrap().max_abs())
            .fold(0.0, f64::max);
        let got = verify_constant_conjugacy(&field, &u, &alpha).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-12);
        assert!(got > 0.0);

        // X = (I + Du)⁻¹ α is conjugated to α by θ ↦ θ + u(θ)
        let grads: Vec<GridFunction> = u
            .iter()
            .flat_map(|ui| (0..2).map(move |j| sample_on_grid(&ui.partial(j), &sizes).unwrap()))
            .collect();
        let mut components = vec![Vec::new(), Vec::new()];
        for p in 0..sizes[0] * sizes[1] {
            let g = |i: usize, j: usize| grads[2 * i + j].samples()[p];
            let jac = Matrix2::new(1.0 + g(0, 0), g(0, 1), g(1, 0), 1.0 + g(1, 1));
            let x = jac.lu().solve(&Vector2::new(1.0, PHI)).unwrap();
            components[0].push(x[0]);
            components[1].push(x[1]);
        }
        let field: Vec<GridFunction> = components
            .into_iter()
            .map(|c| GridFunction::new(sizes.to_vec(), c).unwrap())
            .collect();
        assert!(verify_constant_conjugacy(&field, &u, &alpha).unwrap() <= 1e-9);

        let shifted: Vec<_> = u.iter().map(|ui| ui.shifted_by_constant(0.3)).collect();
        assert_eq!(
            verify_constant_conjugacy(&field, &shifted, &alpha).unwrap(),
            verify_constant_conjugacy(&field, &u, &alpha).unwrap()
        );
        assert!(verify_constant_conjugacy(&field[..1], &u, &alpha).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn conjugation_preserves_rotation_number(eps in -0.5f64..0.5, rho in 0.05f64..0.95) {
            let n = 2000;
            let base = CircleMap::rotation(rho).rotation_number(n).unwrap();
            let conj = rotation_number_of(|x| h_inv(h(x, eps) + rho, eps), n).unwrap();
            prop_assert!((conj.rho_hat - base.rho_hat).abs() <= 2.0 / n as f64);
        }

        #[test]
        fn linearization_never_moves_the_base(x in 0.0f64..1.0, y in 0.0f64..1.0, seed in 0u64..50) {
            use rand::SeedableRng;
            let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(seed);
            let chi = FourierSeries::random_real(1, 4, &mut rng);
            let p = SkewProductMap::new(PHI - 1.0, 1, chi).unwrap();
            let lin = p.linearize(DEFAULT_DIVISOR_FLOOR).unwrap();
            prop_assert!(lin.residual <= 1e-9);
            let z = lin.zeta.evaluate(&[x]).unwrap();
            let moved = p.apply([x, y + z]).unwrap();
            prop_assert_eq!(moved[0], frac(x + p.rho));
        }
    }
}
