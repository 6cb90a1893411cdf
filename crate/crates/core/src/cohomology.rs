//! Cohomological equations over torus rotations (`u(θ+α) - u(θ) = ξ - c`) and
//! linear flows (`L_{X_α} u = ξ - c`), solved mode by mode, together with the
//! classical obstruction tests: Haar average, boundedness of Birkhoff sums and
//! periodic-orbit sums over rational rotations.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diophantine::FrequencyVector;
use crate::error::{Error, Result};
use crate::fourier::{sample_on_grid, FourierSeries, Mode, COEFFICIENT_FLOOR};
use crate::lattice;

/// Divisors below this are resonances, never inverted.
pub const DEFAULT_DIVISOR_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// Discrete time: translation by `α`.
    Map,
    /// Continuous time: the constant vector field `α`.
    Flow,
}

impl FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map" => Ok(Case::Map),
            "flow" => Ok(Case::Flow),
            other => Err(Error::domain(format!("unknown case {other:?} (map|flow)"))),
        }
    }
}

impl Case {
    /// Multiplier of mode `k` under the linear operator `u ↦ u∘f - u`
    /// (map) or `u ↦ L_X u` (flow).
    pub fn divisor(self, k: &[i64], alpha: &FrequencyVector) -> Complex64 {
        let x = alpha.dot(k);
        match self {
            Case::Map => {
                // e^{2πix} - 1 = 2i sin(πx) e^{iπx}, free of cancellation near 0
                let r = x - x.round();
                Complex64::new(0.0, 2.0 * (PI * r).sin()) * lattice::cis_turns(r / 2.0)
            }
            Case::Flow => Complex64::new(0.0, 2.0 * PI * x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorRecord {
    pub k: Mode,
    pub divisor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohomologySolution {
    /// Transfer function, normalized to zero mean.
    pub u: FourierSeries,
    /// `c(ξ) = ξ̂_0`
    pub c: f64,
    pub divisor_report: Vec<DivisorRecord>,
    /// Frequencies with a nonzero coefficient whose divisor fell below the floor.
    pub resonant_set: Vec<Mode>,
}

impl CohomologySolution {
    pub fn is_complete(&self) -> bool {
        self.resonant_set.is_empty()
    }

    pub fn into_complete(self) -> Result<Self> {
        if self.is_complete() {
            Ok(self)
        } else {
            Err(Error::Obstructed {
                resonant: self.resonant_set,
            })
        }
    }

    pub fn smallest_divisor(&self) -> Option<&DivisorRecord> {
        self.divisor_report
            .iter()
            .min_by(|a, b| a.divisor.total_cmp(&b.divisor))
    }
}

fn check_inputs(xi: &FourierSeries, alpha: &FrequencyVector) -> Result<()> {
    if !xi.is_real() {
        return Err(Error::domain("the cocycle generator must be a real series"));
    }
    if xi.dim() != alpha.dim() {
        return Err(Error::domain(format!(
            "series dimension {} does not match frequency dimension {}",
            xi.dim(),
            alpha.dim()
        )));
    }
    Ok(())
}

pub fn solve(
    xi: &FourierSeries,
    alpha: &FrequencyVector,
    divisor_floor: f64,
    case: Case,
) -> Result<CohomologySolution> {
    check_inputs(xi, alpha)?;
    let mut coeffs = std::collections::BTreeMap::new();
    let mut divisor_report = Vec::new();
    let mut resonant_set = Vec::new();
    for (k, &c) in xi.iter() {
        if lattice::is_zero(k) {
            continue;
        }
        let divisor = case.divisor(k, alpha);
        divisor_report.push(DivisorRecord {
            k: k.clone(),
            divisor: divisor.norm(),
        });
        if c.norm() <= COEFFICIENT_FLOOR {
            continue;
        }
        if divisor.norm() < divisor_floor {
            resonant_set.push(k.clone());
        } else {
            coeffs.insert(k.clone(), c / divisor);
        }
    }
    Ok(CohomologySolution {
        u: FourierSeries::from_map(xi.dim(), coeffs, true),
        c: xi.mean(),
        divisor_report,
        resonant_set,
    })
}

/// `u(θ+α) - u(θ) = ξ(θ) - c`; `û_k = ξ̂_k / (e^{2πik·α} - 1)`.
pub fn solve_map(
    xi: &FourierSeries,
    alpha: &FrequencyVector,
    divisor_floor: f64,
) -> Result<CohomologySolution> {
    solve(xi, alpha, divisor_floor, Case::Map)
}

/// `L_{X_α} u = ξ - c`; `û_k = ξ̂_k / (2πi k·α)`.
pub fn solve_flow(
    xi: &FourierSeries,
    alpha: &FrequencyVector,
    divisor_floor: f64,
) -> Result<CohomologySolution> {
    solve(xi, alpha, divisor_floor, Case::Flow)
}

/// Applies the cohomological operator to `u`: `u∘R_α - u` or `L_{X_α} u`.
pub fn apply_operator(u: &FourierSeries, alpha: &FrequencyVector, case: Case) -> FourierSeries {
    match case {
        Case::Map => u.translate(alpha.components()).minus(u).expect("same dimension"),
        Case::Flow => u.directional_derivative(alpha.components()),
    }
}

/// Max over the grid of `|u∘R_α - u - ξ + c|` (map) or `|L_X u - ξ + c|` (flow).
pub fn verify_solution(
    xi: &FourierSeries,
    alpha: &FrequencyVector,
    sol: &CohomologySolution,
    sizes: &[usize],
    case: Case,
) -> Result<f64> {
    check_inputs(xi, alpha)?;
    if !sol.is_complete() {
        return Err(Error::Obstructed {
            resonant: sol.resonant_set.clone(),
        });
    }
    let residual = apply_operator(&sol.u, alpha, case)
        .minus(xi)?
        .shifted_by_constant(sol.c);
    Ok(sample_on_grid(&residual, sizes)?.max_abs())
}

/// `Σ_{i<n} e^{2πi i x} = e^{πi(n-1)x} sin(πnx) / sin(πx)`, stable near resonance.
fn geometric_factor(x: f64, n: u64) -> Complex64 {
    let r = x - x.round();
    let s = (PI * r).sin();
    let magnitude = if s == 0.0 {
        n as f64
    } else {
        (PI * n as f64 * r).sin() / s
    };
    lattice::cis_turns((n as f64 - 1.0) * r / 2.0) * magnitude
}

/// Coefficients of `S_nξ = Σ_{i<n} ξ∘R_α^i`, plus the frequencies whose
/// divisor is below the floor (those grow linearly in `n`).
pub fn birkhoff_sum(
    xi: &FourierSeries,
    alpha: &FrequencyVector,
    n: u64,
    divisor_floor: f64,
) -> Result<(FourierSeries, Vec<Mode>)> {
    check_inputs(xi, alpha)?;
    let mut resonant = Vec::new();
    let sum = xi.map_coefficients(true, |k, c| {
        if !lattice::is_zero(k)
            && c.norm() > COEFFICIENT_FLOOR
            && Case::Map.divisor(k, alpha).norm() < divisor_floor
        {
            resonant.push(k.to_vec());
        }
        c * geometric_factor(alpha.dot(k), n)
    });
    Ok((sum, resonant))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffReport {
    /// `(n, sup_θ |S_nξ(θ)|)`
    pub points: Vec<(u64, f64)>,
    /// The final sup-norm is within 5% of the largest one seen up to half
    /// its `n`.
    pub bounded: bool,
    pub linear_growth_warning: Vec<Mode>,
}

pub fn birkhoff_sup_norm(
    xi: &FourierSeries,
    alpha: &FrequencyVector,
    n: u64,
    sizes: &[usize],
) -> Result<f64> {
    let (sum, _) = birkhoff_sum(xi, alpha, n, DEFAULT_DIVISOR_FLOOR)?;
    Ok(sample_on_grid(&sum, sizes)?.max_abs())
}

/// Sup-norms of Birkhoff sums at `n = 1, 2, 4, …` up to `n_max` (and at
/// `n_max` itself).
pub fn birkhoff_sup_norms(
    xi: &FourierSeries,
    alpha: &FrequencyVector,
    n_max: u64,
    sizes: &[usize],
) -> Result<BirkhoffReport> {
    if n_max < 2 {
        return Err(Error::domain("n_max must be >= 2"));
    }
    let mut ns: Vec<u64> = std::iter::successors(Some(1u64), |n| n.checked_mul(2))
        .take_while(|&n| n <= n_max)
        .collect();
    if *ns.last().unwrap() != n_max {
        ns.push(n_max);
    }
    let (_, linear_growth_warning) = birkhoff_sum(xi, alpha, 1, DEFAULT_DIVISOR_FLOOR)?;
    let mut points = Vec::with_capacity(ns.len());
    for n in ns {
        points.push((n, birkhoff_sup_norm(xi, alpha, n, sizes)?));
    }
    let &(n_last, last) = points.last().unwrap();
    let earlier = points
        .iter()
        .filter(|p| 2 * p.0 <= n_last)
        .fold(0.0_f64, |m, p| m.max(p.1));
    let bounded = linear_growth_warning.is_empty() && last <= 1.05 * earlier + 1e-12;
    Ok(BirkhoffReport {
        points,
        bounded,
        linear_growth_warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSum {
    pub p: i64,
    pub q: u64,
    /// `θ ↦ Σ_{i<q} ξ(θ + ip/q)`
    pub series: FourierSeries,
    pub obstructed: bool,
}

/// Orbit sums over the rotation by `p/q` on `T¹`. Only modes with `q | k`
/// survive, multiplied by `q`; `ξ` is a coboundary over this rotation iff the
/// result is zero.
pub fn periodic_obstruction(xi: &FourierSeries, p: i64, q: u64) -> Result<OrbitSum> {
    if xi.dim() != 1 {
        return Err(Error::domain("periodic orbit sums are defined for series on T^1"));
    }
    if q == 0 {
        return Err(Error::domain("period q must be >= 1"));
    }
    if gcd(p.unsigned_abs(), q) != 1 {
        return Err(Error::domain(format!("p/q = {p}/{q} is not in lowest terms")));
    }
    let q_i = q as i64;
    let coeffs = xi
        .iter()
        .filter(|(k, c)| k[0] % q_i == 0 && c.norm() > COEFFICIENT_FLOOR)
        .map(|(k, &c)| (k.clone(), c * q as f64))
        .collect();
    let series = FourierSeries::from_map(1, coeffs, xi.is_real());
    Ok(OrbitSum {
        p,
        q,
        obstructed: !series.is_empty(),
        series,
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Integral of `ξ` against Haar measure, the unique invariant measure of an
/// irrational rotation or flow.
pub fn invariant_measure_average(xi: &FourierSeries) -> Result<f64> {
    if !xi.is_real() {
        return Err(Error::domain("invariant_measure_average requires a real series"));
    }
    Ok(xi.mean())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantDensity {
    /// `log ρ₀ + u`, annihilated by `L_{X_α}`.
    pub log_density: FourierSeries,
    /// Constant of the solved equation; always zero up to rounding.
    pub c: f64,
}

/// Corrects a log-density `log ρ₀` by `u` with `L_X u = -L_X log ρ₀`, so
/// that `ρ₀ e^u` is invariant under the flow of `α`.
pub fn invariant_density(
    alpha: &FrequencyVector,
    log_rho0: &FourierSeries,
    divisor_floor: f64,
) -> Result<InvariantDensity> {
    let drift = log_rho0.directional_derivative(alpha.components()).scaled(-1.0);
    let sol = solve_flow(&drift, alpha, divisor_floor)?.into_complete()?;
    if sol.c.abs() > 1e-12 {
        return Err(Error::domain(format!(
            "derivative has nonzero mean {:e}; series is not real-symmetric",
            sol.c
        )));
    }
    Ok(InvariantDensity {
        log_density: log_rho0.plus(&sol.u)?.pruned(COEFFICIENT_FLOOR),
        c: sol.c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::check_diophantine;
    use crate::fourier::{grid_points, GridFunction};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_xoshiro::SplitMix64;

    const PHI: f64 = 1.618_033_988_749_895;

    fn alpha(v: &[f64]) -> FrequencyVector {
        FrequencyVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn constants_solve_trivially() {
        let xi = FourierSeries::constant(2, 5.0);
        for case in [Case::Map, Case::Flow] {
            let sol = solve(&xi, &alpha(&[1.0, PHI]), DEFAULT_DIVISOR_FLOOR, case).unwrap();
            assert!(sol.u.is_empty());
            assert_eq!(sol.c, 5.0);
            assert!(sol.is_complete());
        }
    }

    #[test]
    fn map_round_trip_sine() {
        // forward construction: ξ = u₀∘R_α - u₀ + 2
        let a = alpha(&[PHI - 1.0]);
        let u0 = FourierSeries::sine(&[1], 1.0);
        let xi = apply_operator(&u0, &a, Case::Map).shifted_by_constant(2.0);
        let sol = solve_map(&xi, &a, DEFAULT_DIVISOR_FLOOR).unwrap();
        assert!(sol.u.max_coefficient_distance(&u0) < 1e-12);
        assert!((sol.c - 2.0).abs() < 1e-15);
        assert!(verify_solution(&xi, &a, &sol, &[64], Case::Map).unwrap() <= 1e-10);
    }

    #[test]
    fn map_resonance_at_rational_rotation() {
        let a = alpha(&[0.5]);
        let sol = solve_map(&FourierSeries::cosine(&[1], 1.0), &a, DEFAULT_DIVISOR_FLOOR).unwrap();
        assert!(sol.is_complete());
        let record = sol.smallest_divisor().unwrap();
        assert!((record.divisor - 2.0).abs() < 1e-15);

        let sol = solve_map(&FourierSeries::cosine(&[2], 1.0), &a, DEFAULT_DIVISOR_FLOOR).unwrap();
        assert_eq!(sol.resonant_set, vec![vec![-2], vec![2]]);
        assert!(matches!(sol.clone().into_complete(), Err(Error::Obstructed { .. })));
        assert!(verify_solution(&FourierSeries::cosine(&[2], 1.0), &a, &sol, &[8], Case::Map).is_err());
    }

    #[test]
    fn flow_round_trip_cosine() {
        let a = alpha(&[1.0, PHI]);
        let u0 = FourierSeries::cosine(&[1, 1], 1.0);
        // L_X u₀ = -2π(1+φ) sin(2π(θ⁰+θ¹)), written out by hand
        let xi = FourierSeries::sine(&[1, 1], -2.0 * PI * (1.0 + PHI));
        assert!(apply_operator(&u0, &a, Case::Flow).max_coefficient_distance(&xi) < 1e-13);
        let sol = solve_flow(&xi, &a, DEFAULT_DIVISOR_FLOOR).unwrap();
        assert!(sol.u.max_coefficient_distance(&u0) < 1e-12);
        assert!(sol.c.abs() < 1e-15);
        assert!(verify_solution(&xi, &a, &sol, &[16, 16], Case::Flow).unwrap() < 1e-10);
    }

    #[test]
    fn flow_exact_resonance() {
        let xi = FourierSeries::cosine(&[1, -1], 1.0);
        let sol = solve_flow(&xi, &alpha(&[1.0, 1.0]), DEFAULT_DIVISOR_FLOOR).unwrap();
        assert_eq!(sol.resonant_set, vec![vec![-1, 1], vec![1, -1]]);
    }

    #[test]
    fn dimension_and_realness_checked() {
        let xi = FourierSeries::cosine(&[1, 1], 1.0);
        assert!(solve_map(&xi, &alpha(&[PHI]), 1e-10).is_err());
        let complex = FourierSeries::mode(&[1], Complex64::new(1.0, 0.0));
        assert!(solve_map(&complex, &alpha(&[PHI]), 1e-10).is_err());
    }

    #[test]
    fn residual_of_trivial_solutions() {
        let a = alpha(&[PHI - 1.0]);
        let xi = FourierSeries::cosine(&[1], 1.0).shifted_by_constant(0.5);
        let lazy = CohomologySolution {
            u: FourierSeries::zero(1),
            c: xi.mean(),
            divisor_report: vec![],
            resonant_set: vec![],
        };
        let r = verify_solution(&xi, &a, &lazy, &[64], Case::Map).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let zero = FourierSeries::zero(1);
        let none = CohomologySolution { c: 0.0, ..lazy };
        assert_eq!(verify_solution(&zero, &a, &none, &[8], Case::Map).unwrap(), 0.0);
    }

    /// Direct summation of ξ along the orbit; the oracle for `birkhoff_sum`.
    fn direct_birkhoff(xi: &FourierSeries, a: f64, n: u64, theta: f64) -> f64 {
        (0..n)
            .map(|i| xi.evaluate(&[lattice::frac(theta + i as f64 * a)]).unwrap())
            .sum()
    }

    #[test]
    fn birkhoff_closed_form_matches_direct_summation() {
        let mut rng = SplitMix64::seed_from_u64(5);
        let xi = FourierSeries::random_real(1, 5, &mut rng);
        let a = PHI - 1.0;
        for n in [1, 7, 100, 1000] {
            let (s, warn) = birkhoff_sum(&xi, &alpha(&[a]), n, DEFAULT_DIVISOR_FLOOR).unwrap();
            assert!(warn.is_empty());
            for theta in [0.0, 0.3, 0.77] {
                let direct = direct_birkhoff(&xi, a, n, theta);
                assert!((s.evaluate(&[theta]).unwrap() - direct).abs() < 1e-9 * (n as f64));
            }
        }
    }

    #[test]
    fn birkhoff_sums_of_coboundary_stay_bounded() {
        let mut rng = SplitMix64::seed_from_u64(9);
        let u0 = FourierSeries::random_real(1, 6, &mut rng);
        let a = alpha(&[PHI - 1.0]);
        let xi = apply_operator(&u0, &a, Case::Map);
        let sup_u = sample_on_grid(&u0, &[256]).unwrap().max_abs();
        let report = birkhoff_sup_norms(&xi, &a, 10_000, &[256]).unwrap();
        for &(n, s) in &report.points {
            assert!(s <= 2.0 * sup_u + 1e-8, "n={n}: {s} > 2·{sup_u}");
        }
    }

    #[test]
    fn birkhoff_sums_of_constant_grow_linearly() {
        let report =
            birkhoff_sup_norms(&FourierSeries::constant(1, 1.0), &alpha(&[PHI]), 1000, &[8]).unwrap();
        for &(n, s) in &report.points {
            assert!((s - n as f64).abs() < 1e-9);
        }
        assert_eq!(report.points.last().unwrap().0, 1000);
        assert!(!report.bounded);
    }

    #[test]
    fn birkhoff_over_truncated_liouville_rotation() {
        let rho = 0.1 + 0.01 + 1e-6;
        let xi = FourierSeries::cosine(&[1], 1.0);
        let a = alpha(&[rho]);
        let small = birkhoff_sup_norm(&xi, &a, 100, &[64]).unwrap();
        let large = birkhoff_sup_norm(&xi, &a, 10_000, &[64]).unwrap();
        // direct two-point oracle: |S_n cos| peaks at |sin(πnρ)/sin(πρ)|
        let peak = |n: f64| ((PI * n * rho).sin() / (PI * rho).sin()).abs();
        assert!((large - peak(10_000.0)).abs() < 1e-3 * peak(10_000.0));
        assert!((direct_birkhoff(&xi, rho, 100, 0.0).abs() - small).abs() < 1e-3);
        assert!(large > 10.0 * small);
    }

    #[test]
    fn resonant_birkhoff_sum_warns() {
        let report =
            birkhoff_sup_norms(&FourierSeries::cosine(&[2], 1.0), &alpha(&[0.5]), 64, &[8]).unwrap();
        assert_eq!(report.linear_growth_warning, vec![vec![-2], vec![2]]);
        assert!((report.points.last().unwrap().1 - 64.0).abs() < 1e-9);
        assert!(!report.bounded);
    }

    #[test]
    fn orbit_sums() {
        let sum = periodic_obstruction(&FourierSeries::cosine(&[1], 1.0), 1, 2).unwrap();
        assert!(sum.series.is_empty() && !sum.obstructed);
        let sum = periodic_obstruction(&FourierSeries::constant(1, 1.0), 1, 3).unwrap();
        assert_eq!(sum.series.coeff(&[0]).re, 3.0);
        assert!(sum.obstructed);
        let xi = FourierSeries::cosine(&[2], 1.0);
        let sum = periodic_obstruction(&xi, 1, 2).unwrap();
        assert!(sum.obstructed);
        for theta in [0.0, 0.1, 0.35] {
            let direct = xi.evaluate(&[theta]).unwrap() + xi.evaluate(&[theta + 0.5]).unwrap();
            assert!((sum.series.evaluate(&[theta]).unwrap() - direct).abs() < 1e-12);
        }
        assert!(periodic_obstruction(&xi, 2, 4).is_err());
        assert!(periodic_obstruction(&xi, 1, 0).is_err());
    }

    #[test]
    fn haar_averages() {
        let xi = FourierSeries::cosine(&[1], 1.0).shifted_by_constant(4.0);
        assert_eq!(invariant_measure_average(&xi).unwrap(), 4.0);
        assert_eq!(invariant_measure_average(&FourierSeries::cosine(&[1], 1.0)).unwrap(), 0.0);
        let mut rng = SplitMix64::seed_from_u64(1);
        let xi = FourierSeries::random_real(2, 4, &mut rng);
        // trapezoid quadrature is exact for trigonometric polynomials on a fine grid
        let quad = GridFunction::from_fn(vec![16, 16], |t| xi.evaluate(t).unwrap())
            .unwrap()
            .mean();
        assert!((invariant_measure_average(&xi).unwrap() - quad).abs() < 1e-10);
    }

    #[test]
    fn invariant_densities() {
        let a = alpha(&[PHI]);
        let out = invariant_density(&a, &FourierSeries::zero(1), DEFAULT_DIVISOR_FLOOR).unwrap();
        assert!(out.log_density.is_empty());
        assert_eq!(out.c, 0.0);

        let log_rho = FourierSeries::sine(&[1], 1.0);
        let out = invariant_density(&a, &log_rho, DEFAULT_DIVISOR_FLOOR).unwrap();
        let derivative = out.log_density.directional_derivative(a.components());
        for p in grid_points(&[64]) {
            assert!(out.log_density.evaluate(&p).unwrap().abs() < 1e-10);
            assert!(derivative.evaluate(&p).unwrap().abs() < 1e-10);
        }
        assert!(out.c.abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn map_solver_is_linear(seed in 0u64..1000, a_coef in -3.0f64..3.0, b_coef in -3.0f64..3.0) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let x1 = FourierSeries::random_real(2, 4, &mut rng);
            let x2 = FourierSeries::random_real(2, 4, &mut rng);
            let a = alpha(&[PHI - 1.0, 2f64.sqrt() - 1.0]);
            let s1 = solve_map(&x1, &a, 1e-10).unwrap();
            let s2 = solve_map(&x2, &a, 1e-10).unwrap();
            let s12 = solve_map(&x1.combine(a_coef, &x2, b_coef).unwrap(), &a, 1e-10).unwrap();
            let expected = s1.u.combine(a_coef, &s2.u, b_coef).unwrap();
            prop_assert!(s12.u.max_coefficient_distance(&expected) < 1e-12);
            prop_assert!((s12.c - (a_coef * s1.c + b_coef * s2.c)).abs() < 1e-12);
        }

        #[test]
        fn coboundaries_are_recovered(seed in 0u64..1000, c in -5.0f64..5.0) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let u0 = FourierSeries::random_real(1, 8, &mut rng);
            let a = alpha(&[PHI - 1.0]);
            let xi = apply_operator(&u0, &a, Case::Map).shifted_by_constant(c);
            let sol = solve_map(&xi, &a, 1e-10).unwrap();
            let centred = u0.shifted_by_constant(-u0.mean());
            prop_assert!(sol.u.max_coefficient_distance(&centred) < 1e-12);
            prop_assert!((sol.c - c).abs() < 1e-12);
        }

        #[test]
        fn haar_pairing_is_the_solver_constant(seed in 0u64..1000) {
            let mut rng = SplitMix64::seed_from_u64(seed);
            let psi = FourierSeries::random_real(2, 3, &mut rng);
            let sol = solve_flow(&psi, &alpha(&[1.0, PHI]), 1e-10).unwrap();
            prop_assert_eq!(invariant_measure_average(&psi).unwrap(), sol.c);
        }

        #[test]
        fn tame_estimate(seed in 0u64..500, s in 0.0f64..3.0) {
            let a = alpha(&[1.0, PHI]);
            let (c_dio, tau) = (0.6, 1.0);
            let cert = check_diophantine(&a, c_dio, tau, 8).unwrap();
            prop_assert!(cert.holds);
            let mut rng = SplitMix64::seed_from_u64(seed);
            let xi = FourierSeries::random_real(2, 8, &mut rng).shifted_by_constant(-5.0);
            let sol = solve_flow(&xi, &a, 1e-10).unwrap();
            let lhs = sol.u.sobolev_norm(s);
            let rhs = xi.sobolev_norm(s + tau + 2.0) / c_dio;
            prop_assert!(lhs <= rhs, "{} > {}", lhs, rhs);
        }
    }
}
