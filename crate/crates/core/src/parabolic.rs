//! Parabolic affine maps `B(θ) = (θ⁰ + ρ, θ¹ + n₀θ⁰ + β)` of `T²`, their
//! invariant distributions `T_m`, and the suspension flow of `B`.
//!
//! The suspension is charted as `T² × [0, 1)` with `(θ, 1) ~ (Bθ, 0)`; the
//! flow moves the fiber coordinate at unit speed (per return time) and applies
//! `B` each time it wraps.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{FourierSeries, Mode, COEFFICIENT_FLOOR};
use crate::lattice::{self, cis_turns, frac};
use crate::stats::linear_fit;

/// Singular values below this count as zero in [`independence_matrix`].
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Node-doubling tolerance for [`suspension_pair`].
pub const DEFAULT_QUADRATURE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicAffineMap {
    pub n0: i64,
    pub rho: f64,
    pub beta: f64,
}

impl ParabolicAffineMap {
    pub fn new(n0: i64, rho: f64, beta: f64) -> Result<Self> {
        if !(rho.is_finite() && beta.is_finite()) {
            return Err(Error::domain("rho and beta must be finite"));
        }
        Ok(ParabolicAffineMap { n0, rho, beta })
    }

    pub fn identity() -> Self {
        ParabolicAffineMap {
            n0: 0,
            rho: 0.0,
            beta: 0.0,
        }
    }

    /// The linear part `[[1, 0], [n₀, 1]]`.
    pub fn matrix(&self) -> [[i64; 2]; 2] {
        [[1, 0], [self.n0, 1]]
    }

    pub fn inverse(&self) -> Self {
        ParabolicAffineMap {
            n0: -self.n0,
            rho: -self.rho,
            beta: self.n0 as f64 * self.rho - self.beta,
        }
    }

    pub fn apply(&self, theta: [f64; 2]) -> [f64; 2] {
        [
            frac(theta[0] + self.rho),
            frac(theta[1] + self.n0 as f64 * theta[0] + self.beta),
        ]
    }

    /// `Bⁿθ` for any integer `n`.
    pub fn iterate(&self, theta: [f64; 2], n: i64) -> [f64; 2] {
        let step = if n >= 0 { *self } else { self.inverse() };
        let mut p = [frac(theta[0]), frac(theta[1])];
        for _ in 0..n.unsigned_abs() {
            p = step.apply(p);
        }
        p
    }

    /// Coefficients of `ψ∘B`: `(ψ∘B)^(k, ℓ) = ψ̂(k - n₀ℓ, ℓ) e^{2πi((k - n₀ℓ)ρ + ℓβ)}`.
    pub fn pullback(&self, psi: &FourierSeries) -> Result<FourierSeries> {
        check_planar(psi)?;
        let mut coeffs = BTreeMap::new();
        for (k, &c) in psi.iter() {
            let (a, l) = (k[0], k[1]);
            let target = l
                .checked_mul(self.n0)
                .and_then(|s| s.checked_add(a))
                .ok_or_else(|| Error::Overflow(format!("sheared mode of {k:?}")))?;
            let phase = cis_turns(a as f64 * self.rho) * cis_turns(l as f64 * self.beta);
            coeffs.insert(vec![target, l], c * phase);
        }
        Ok(FourierSeries::from_map(2, coeffs, psi.is_real()))
    }

    /// `ψ∘Bⁿ` for any integer `n`.
    pub fn pullback_iterate(&self, psi: &FourierSeries, n: i64) -> Result<FourierSeries> {
        let step = if n >= 0 { *self } else { self.inverse() };
        let mut out = psi.clone();
        for _ in 0..n.unsigned_abs() {
            out = step.pullback(&out)?;
        }
        Ok(out)
    }
}

fn check_planar(psi: &FourierSeries) -> Result<()> {
    if psi.dim() != 2 {
        return Err(Error::domain(format!(
            "expected a series on T², got dimension {}",
            psi.dim()
        )));
    }
    Ok(())
}

/// Index of the distribution `T_m`, with the range `|k| <= truncation` of its
/// defining sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantDistributionIndex {
    pub m: i64,
    pub truncation: u64,
}

impl InvariantDistributionIndex {
    pub fn new(m: i64, truncation: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("T_m needs m != 0"));
        }
        if truncation == 0 {
            return Err(Error::domain("truncation must be >= 1"));
        }
        Ok(InvariantDistributionIndex { m, truncation })
    }
}

/// Smallest `K` for which every mode of `psi` on the line `{(k n₀ m, m)}` has
/// `|k| <= K`.
pub fn required_truncation(m: i64, n0: i64, psi: &FourierSeries) -> u64 {
    let step = (n0.unsigned_abs()).saturating_mul(m.unsigned_abs()).max(1);
    (psi.support_radius() / step).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub value: Complex64,
    pub truncation: u64,
    /// Nonzero terms that entered the sum.
    pub terms: usize,
}

/// `e^{-2πi(k m β + k(k-1)/2 · m n₀ ρ)}`, with the integer prefactors formed
/// exactly before any rounding.
fn tm_phase(k: i64, m: i64, map: &ParabolicAffineMap) -> Result<Complex64> {
    let overflow = || Error::Overflow(format!("T_m phase at k = {k}"));
    let a = k.checked_mul(m).ok_or_else(overflow)?;
    let b = (k.checked_mul(k - 1).ok_or_else(overflow)? / 2)
        .checked_mul(m)
        .and_then(|x| x.checked_mul(map.n0))
        .ok_or_else(overflow)?;
    Ok(cis_turns(-(a as f64) * map.beta) * cis_turns(-(b as f64) * map.rho))
}

fn pair_terms(m: i64, k_max: u64, map: &ParabolicAffineMap, psi: &FourierSeries) -> Result<Pairing> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    let k_max = k_max as i64;
    for k in -k_max..=k_max {
        let c = psi.coeff(&[k * map.n0 * m, m]);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        value += c * tm_phase(k, m, map)?;
        terms += 1;
    }
    Ok(Pairing {
        value,
        truncation: k_max as u64,
        terms,
    })
}

/// `⟨T_m, ψ⟩ = Σ_{|k| <= K} ψ̂(k n₀ m, m) e^{-2πi k m (β + (k-1) n₀ ρ / 2)}`.
///
/// The sum is exact for band-limited `ψ` once `K` covers the support; a
/// shorter truncation is an [`Error::IncompleteSum`].
pub fn distribution_pair(
    idx: InvariantDistributionIndex,
    map: &ParabolicAffineMap,
    psi: &FourierSeries,
) -> Result<Pairing> {
    check_planar(psi)?;
    check_shear(map)?;
    let required = required_truncation(idx.m, map.n0, psi);
    if idx.truncation < required {
        return Err(Error::IncompleteSum {
            given: idx.truncation,
            required,
        });
    }
    pair_terms(idx.m, idx.truncation, map, psi)
}

/// [`distribution_pair`] with the truncation chosen from the support of `psi`.
pub fn pair(m: i64, map: &ParabolicAffineMap, psi: &FourierSeries) -> Result<Pairing> {
    check_planar(psi)?;
    let idx = InvariantDistributionIndex::new(m, required_truncation(m, map.n0, psi))?;
    distribution_pair(idx, map, psi)
}

fn check_shear(map: &ParabolicAffineMap) -> Result<()> {
    if map.n0 == 0 {
        return Err(Error::domain(
            "n0 = 0: the map is a translation and T_m is not defined",
        ));
    }
    Ok(())
}

/// `|⟨T_m, ψ∘B⟩ - ⟨T_m, ψ⟩|`, with `K` enlarged to cover the sheared support.
pub fn verify_invariance(
    idx: InvariantDistributionIndex,
    map: &ParabolicAffineMap,
    psi: &FourierSeries,
) -> Result<f64> {
    let moved = map.pullback(psi)?;
    let k = idx
        .truncation
        .max(required_truncation(idx.m, map.n0, psi))
        .max(required_truncation(idx.m, map.n0, &moved));
    let idx = InvariantDistributionIndex::new(idx.m, k)?;
    let before = distribution_pair(idx, map, psi)?.value;
    let after = distribution_pair(idx, map, &moved)?.value;
    Ok((after - before).norm())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingMatrix {
    /// Row `i`, column `j` holds `⟨T_{m_i}, ψ_j⟩`.
    pub entries: Vec<Vec<Complex64>>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

pub fn independence_matrix(
    ms: &[i64],
    map: &ParabolicAffineMap,
    tests: &[FourierSeries],
) -> Result<PairingMatrix> {
    if ms.len() > tests.len() {
        return Err(Error::domain(format!(
            "{} distributions need at least as many test functions, got {}",
            ms.len(),
            tests.len()
        )));
    }
    let mut entries = Vec::with_capacity(ms.len());
    for &m in ms {
        let row = tests
            .iter()
            .map(|psi| pair(m, map, psi).map(|p| p.value))
            .collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    let singular_values = if ms.is_empty() {
        Vec::new()
    } else {
        let matrix = DMatrix::from_fn(ms.len(), tests.len(), |i, j| entries[i][j]);
        let mut sv: Vec<f64> = matrix.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    };
    let rank = singular_values.iter().filter(|&&s| s > RANK_THRESHOLD).count();
    Ok(PairingMatrix {
        entries,
        singular_values,
        rank,
    })
}

/// The restriction of a series on `T³ = T² × T¹` to the slice at `t`.
pub fn slice(psi: &FourierSeries, t: f64) -> Result<FourierSeries> {
    if psi.dim() != 3 {
        return Err(Error::domain(format!(
            "slicing needs a series on T³, got dimension {}",
            psi.dim()
        )));
    }
    let mut coeffs: BTreeMap<Mode, Complex64> = BTreeMap::new();
    for (k, &c) in psi.iter() {
        *coeffs.entry(vec![k[0], k[1]]).or_default() += c * cis_turns(k[2] as f64 * t);
    }
    coeffs.retain(|_, c| c.norm() > COEFFICIENT_FLOOR);
    Ok(FourierSeries::from_map(2, coeffs, psi.is_real()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuspensionSpec {
    pub base: ParabolicAffineMap,
    /// Flow time of one full turn around the base circle.
    pub return_time: f64,
    pub quadrature_points: usize,
}

impl SuspensionSpec {
    pub fn new(base: ParabolicAffineMap, return_time: f64, quadrature_points: usize) -> Result<Self> {
        let spec = SuspensionSpec {
            base,
            return_time,
            quadrature_points,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.return_time.is_finite() && self.return_time > 0.0) {
            return Err(Error::domain("return time must be positive"));
        }
        if self.quadrature_points < 16 {
            return Err(Error::domain("at least 16 quadrature points are required"));
        }
        Ok(())
    }

    /// `Φ^s(θ, t) = (B^{⌊t + s'⌋}θ, frac(t + s'))` with `s' = s / return_time`.
    pub fn flow(&self, point: SuspensionPoint, s: f64) -> SuspensionPoint {
        let fiber = point.t + s / self.return_time;
        let wraps = fiber.floor();
        SuspensionPoint {
            theta: self.base.iterate(point.theta, wraps as i64),
            t: frac(fiber),
        }
    }

    /// Distance in the product sup metric, taking the gluing `(θ, 1) ~ (Bθ, 0)`
    /// into account.
    pub fn distance(&self, x: SuspensionPoint, y: SuspensionPoint) -> f64 {
        let torus = |a: [f64; 2], b: [f64; 2]| {
            lattice::circle_distance(a[0], b[0]).max(lattice::circle_distance(a[1], b[1]))
        };
        let direct = torus(x.theta, y.theta).max((x.t - y.t).abs());
        let x_below = torus(self.base.apply(x.theta), y.theta).max((x.t - 1.0 - y.t).abs());
        let y_below = torus(x.theta, self.base.apply(y.theta)).max((y.t - 1.0 - x.t).abs());
        direct.min(x_below).min(y_below)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuspensionPoint {
    pub theta: [f64; 2],
    pub t: f64,
}

impl SuspensionPoint {
    pub fn new(theta: [f64; 2], t: f64) -> Self {
        SuspensionPoint {
            theta: [frac(theta[0]), frac(theta[1])],
            t: frac(t),
        }
    }
}

/// A function on the suspension, given by its slices `t ↦ ψ(·, t)` on the
/// chart `T² × [0, 1)`.
pub trait SuspensionFunction {
    fn slice(&self, t: f64) -> Result<FourierSeries>;
}

impl<F> SuspensionFunction for F
where
    F: Fn(f64) -> Result<FourierSeries>,
{
    fn slice(&self, t: f64) -> Result<FourierSeries> {
        self(t)
    }
}

/// `ψ∘Φ^s`, whose slice at `t` is `ψ(·, frac(t + s))` pulled back by
/// `B^{⌊t + s⌋}`.
pub struct Transported<'a, F: ?Sized> {
    spec: SuspensionSpec,
    psi: &'a F,
    s: f64,
}

pub fn transported<'a, F: SuspensionFunction + ?Sized>(
    spec: &SuspensionSpec,
    psi: &'a F,
    s: f64,
) -> Transported<'a, F> {
    Transported {
        spec: *spec,
        psi,
        s,
    }
}

impl<F: SuspensionFunction + ?Sized> SuspensionFunction for Transported<'_, F> {
    fn slice(&self, t: f64) -> Result<FourierSeries> {
        let fiber = t + self.s / self.spec.return_time;
        let wraps = fiber.floor();
        let inner = self.psi.slice(frac(fiber))?;
        self.spec.base.pullback_iterate(&inner, wraps as i64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuspensionPairing {
    pub value: Complex64,
    pub nodes: usize,
    /// `|value(2J nodes) - value(J nodes)|`
    pub refine_difference: f64,
}

/// `⟨T̃_m, ψ⟩ = ∫₀¹ ⟨T_m, ψ(·, t)⟩ dt` by the periodic trapezoid rule.
pub fn suspension_pair<F: SuspensionFunction + ?Sized>(
    spec: &SuspensionSpec,
    m: i64,
    psi: &F,
) -> Result<SuspensionPairing> {
    suspension_pair_with(spec, m, psi, DEFAULT_QUADRATURE_TOLERANCE)
}

pub fn suspension_pair_with<F: SuspensionFunction + ?Sized>(
    spec: &SuspensionSpec,
    m: i64,
    psi: &F,
    tolerance: f64,
) -> Result<SuspensionPairing> {
    spec.validate()?;
    check_shear(&spec.base)?;
    let trapezoid = |nodes: usize| -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..nodes {
            let slice = psi.slice(j as f64 / nodes as f64)?;
            total += pair(m, &spec.base, &slice)?.value;
        }
        Ok(total / nodes as f64)
    };
    let nodes = spec.quadrature_points;
    let coarse = trapezoid(nodes)?;
    let fine = trapezoid(2 * nodes)?;
    let difference = (fine - coarse).norm();
    if difference > tolerance {
        return Err(Error::Refine {
            difference,
            tolerance,
        });
    }
    Ok(SuspensionPairing {
        value: fine,
        nodes: 2 * nodes,
        refine_difference: difference,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationProfile {
    /// `(t, d(Φᵗx, Φᵗy))`
    pub samples: Vec<(f64, f64)>,
    pub max: f64,
}

impl SeparationProfile {
    /// Least-squares slope of the distance against time.
    pub fn slope(&self) -> f64 {
        let (ts, ds): (Vec<f64>, Vec<f64>) = self.samples.iter().copied().unzip();
        linear_fit(&ts, &ds).0
    }
}

pub fn separation_profile(
    spec: &SuspensionSpec,
    x: SuspensionPoint,
    y: SuspensionPoint,
    horizon: f64,
    dt: f64,
) -> Result<SeparationProfile> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain("dt must be positive"));
    }
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::domain("time horizon must be non-negative"));
    }
    let steps = (horizon / dt + 1e-9).floor() as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut max: f64 = 0.0;
    for i in 0..=steps {
        let t = i as f64 * dt;
        let d = spec.distance(spec.flow(x, t), spec.flow(y, t));
        max = max.max(d);
        samples.push((t, d));
    }
    Ok(SeparationProfile { samples, max })
}
