//! Finitely supported Fourier series on `T^d` and uniform grid samples.
//!
//! Coefficients follow `ĉ_k = ∫ f(θ) e^{-2πi k·θ} dθ`, so `ĉ_0` is the mean of
//! `f` and `f(θ) = Σ ĉ_k e^{2πi k·θ}`. Grids sample `θ_j = j / size` on every
//! axis with the last axis varying fastest.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice;

/// A point of the integer lattice `Z^d`.
pub type Mode = Vec<i64>;

/// Coefficients smaller than this are treated as exactly zero.
pub const COEFFICIENT_FLOOR: f64 = 1e-15;
/// Tolerance on `ĉ_{-k} = conj(ĉ_k)` for series declared real.
pub const REALNESS_TOLERANCE: f64 = 1e-12;
/// Largest imaginary part `evaluate` silently discards.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesRepr", into = "SeriesRepr")]
pub struct FourierSeries {
    dim: usize,
    coeffs: BTreeMap<Mode, Complex64>,
    real: bool,
}

impl FourierSeries {
    /// Builds a series, summing repeated modes. A series declared real must be
    /// conjugate-symmetric (within [`REALNESS_TOLERANCE`]).
    pub fn new(
        dim: usize,
        coeffs: impl IntoIterator<Item = (Mode, Complex64)>,
        real: bool,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("series dimension must be at least 1"));
        }
        let mut map: BTreeMap<Mode, Complex64> = BTreeMap::new();
        for (k, c) in coeffs {
            if k.len() != dim {
                return Err(Error::domain(format!(
                    "mode {k:?} has length {} but the series has dimension {dim}",
                    k.len()
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::domain(format!("non-finite coefficient at {k:?}")));
            }
            *map.entry(k).or_default() += c;
        }
        let series = FourierSeries {
            dim,
            coeffs: map,
            real,
        };
        if real {
            let defect = series.realness_defect();
            if defect > REALNESS_TOLERANCE {
                return Err(Error::NonReal { residue: defect });
            }
        }
        Ok(series)
    }

    pub fn zero(dim: usize) -> Self {
        FourierSeries {
            dim,
            coeffs: BTreeMap::new(),
            real: true,
        }
    }

    pub fn constant(dim: usize, value: f64) -> Self {
        let mut s = Self::zero(dim);
        if value != 0.0 {
            s.coeffs.insert(vec![0; dim], Complex64::new(value, 0.0));
        }
        s
    }

    /// `amplitude · cos(2π k·θ)`
    pub fn cosine(k: &[i64], amplitude: f64) -> Self {
        Self::trig(k, Complex64::new(amplitude / 2.0, 0.0))
    }

    /// `amplitude · sin(2π k·θ)`
    pub fn sine(k: &[i64], amplitude: f64) -> Self {
        Self::trig(k, Complex64::new(0.0, -amplitude / 2.0))
    }

    /// Real series `c e^{2πik·θ} + conj(c) e^{-2πik·θ}`.
    fn trig(k: &[i64], c: Complex64) -> Self {
        if lattice::is_zero(k) {
            return Self::constant(k.len(), 2.0 * c.re);
        }
        let mut s = Self::zero(k.len());
        s.coeffs.insert(k.to_vec(), c);
        s.coeffs.insert(lattice::negate(k), c.conj());
        s
    }

    /// A single complex exponential `c e^{2πik·θ}` (not real).
    pub fn mode(k: &[i64], c: Complex64) -> Self {
        let mut s = Self::zero(k.len());
        s.real = false;
        s.coeffs.insert(k.to_vec(), c);
        s
    }

    /// Random real band-limited series with `|k|∞ <= radius`, coefficients
    /// uniform in the unit square damped by `(1 + |k|∞)^{-2}`.
    pub fn random_real<R: Rng + ?Sized>(dim: usize, radius: u64, rng: &mut R) -> Self {
        let mut s = Self::zero(dim);
        for k in lattice::box_points(dim, radius) {
            let weight = (1.0 + lattice::sup_norm(&k) as f64).powi(-2);
            if lattice::is_zero(&k) {
                s.coeffs
                    .insert(k, Complex64::new(rng.random_range(-1.0..1.0), 0.0));
            } else if lattice::is_canonical(&k) {
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    * weight;
                s.coeffs.insert(lattice::negate(&k), c.conj());
                s.coeffs.insert(k, c);
            }
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at `k`; absent modes are exactly zero.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Stored `(k, ĉ_k)` in lexicographic order of `k`.
    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Complex64)> {
        self.coeffs.iter()
    }

    /// `ĉ_0`, the Haar average of a real series.
    pub fn mean(&self) -> f64 {
        self.coeff(&vec![0; self.dim]).re
    }

    /// `max |k|∞` over stored modes (0 for the empty series).
    pub fn support_radius(&self) -> u64 {
        self.coeffs
            .keys()
            .map(|k| lattice::sup_norm(k))
            .max()
            .unwrap_or(0)
    }

    /// `max_k |ĉ_k - conj(ĉ_{-k})|`, including `|Im ĉ_0|`.
    pub fn realness_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| (c - self.coeff(&lattice::negate(k)).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Applies `f(k, ĉ_k)` to every stored coefficient. The caller is
    /// responsible for the realness flag staying truthful.
    pub(crate) fn map_coefficients(
        &self,
        real: bool,
        mut f: impl FnMut(&[i64], Complex64) -> Complex64,
    ) -> Self {
        FourierSeries {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(k, &c)| (k.clone(), f(k, c))).collect(),
            real,
        }
    }

    pub(crate) fn from_map(dim: usize, coeffs: BTreeMap<Mode, Complex64>, real: bool) -> Self {
        FourierSeries { dim, coeffs, real }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map_coefficients(self.real, |_, c| c * factor)
    }

    /// `a·self + b·other`
    pub fn combine(&self, a: f64, other: &FourierSeries, b: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::domain(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        let mut coeffs: BTreeMap<Mode, Complex64> =
            self.coeffs.iter().map(|(k, &c)| (k.clone(), c * a)).collect();
        for (k, &c) in &other.coeffs {
            *coeffs.entry(k.clone()).or_default() += c * b;
        }
        Ok(FourierSeries {
            dim: self.dim,
            coeffs,
            real: self.real && other.real,
        })
    }

    pub fn plus(&self, other: &FourierSeries) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn minus(&self, other: &FourierSeries) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    /// `self + value`
    pub fn shifted_by_constant(&self, value: f64) -> Self {
        let mut s = self.clone();
        *s.coeffs.entry(vec![0; self.dim]).or_default() += value;
        s
    }

    /// `θ ↦ f(θ + shift)`
    pub fn translate(&self, shift: &[f64]) -> Self {
        self.map_coefficients(self.real, |k, c| c * lattice::cis_turns(lattice::dot(k, shift)))
    }

    /// Derivative along the constant field `direction`: `Σ 2πi (k·v) ĉ_k e^{2πik·θ}`.
    pub fn directional_derivative(&self, direction: &[f64]) -> Self {
        self.map_coefficients(self.real, |k, c| {
            c * Complex64::new(0.0, TAU * lattice::dot(k, direction))
        })
    }

    /// `∂f/∂θ^axis`
    pub fn partial(&self, axis: usize) -> Self {
        self.map_coefficients(self.real, |k, c| c * Complex64::new(0.0, TAU * k[axis] as f64))
    }

    /// Drops coefficients with `|ĉ_k| < floor`.
    pub fn pruned(&self, floor: f64) -> Self {
        FourierSeries {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| c.norm() >= floor)
                .map(|(k, &c)| (k.clone(), c))
                .collect(),
            real: self.real,
        }
    }

    /// `max_k |ĉ_k - d̂_k|` over the union of supports.
    pub fn max_coefficient_distance(&self, other: &FourierSeries) -> f64 {
        let mine = self
            .coeffs
            .iter()
            .map(|(k, c)| (c - other.coeff(k)).norm());
        let theirs = other
            .coeffs
            .iter()
            .filter(|(k, _)| !self.coeffs.contains_key(*k))
            .map(|(_, c)| c.norm());
        mine.chain(theirs).fold(0.0, f64::max)
    }

    /// `(Σ (1 + |k|∞)^{2s} |ĉ_k|²)^{1/2}`
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, c)| (1.0 + lattice::sup_norm(k) as f64).powf(2.0 * s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ ĉ_k e^{2πik·θ}` summed in lexicographic order of `k`.
    pub fn evaluate_complex(&self, theta: &[f64]) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(k, c)| c * lattice::cis_turns(lattice::dot(k, theta)))
            .sum()
    }

    pub fn evaluate(&self, theta: &[f64]) -> Result<f64> {
        if !self.real {
            return Err(Error::domain("evaluate requires a series declared real"));
        }
        if theta.len() != self.dim {
            return Err(Error::domain(format!(
                "point has {} coordinates, series dimension is {}",
                theta.len(),
                self.dim
            )));
        }
        let z = self.evaluate_complex(theta);
        if z.im.abs() > IMAGINARY_RESIDUE_TOLERANCE {
            return Err(Error::NonReal { residue: z.im.abs() });
        }
        Ok(z.re)
    }

    /// `(r, max |ĉ_k|)` over shells `|k|∞ = r` for `r = 0..=support_radius`.
    pub fn decay_profile(&self) -> Vec<(u64, f64)> {
        let radius = self.support_radius();
        let mut shells = vec![0.0_f64; radius as usize + 1];
        for (k, c) in &self.coeffs {
            let r = lattice::sup_norm(k) as usize;
            shells[r] = shells[r].max(c.norm());
        }
        shells
            .into_iter()
            .enumerate()
            .map(|(r, m)| (r as u64, m))
            .collect()
    }
}

/// Real samples on a uniform power-of-two grid of `T^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    sizes: Vec<usize>,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(sizes: Vec<usize>, samples: Vec<f64>) -> Result<Self> {
        check_sizes(&sizes)?;
        let total: usize = sizes.iter().product();
        if samples.len() != total {
            return Err(Error::domain(format!(
                "grid {sizes:?} needs {total} samples, got {}",
                samples.len()
            )));
        }
        Ok(GridFunction { sizes, samples })
    }

    pub fn from_fn(sizes: Vec<usize>, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        check_sizes(&sizes)?;
        let samples = grid_points(&sizes).map(|p| f(&p)).collect();
        Ok(GridFunction { sizes, samples })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// `(θ_j, f(θ_j))` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
        grid_points(&self.sizes).zip(self.samples.iter().copied())
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::domain("grid needs at least one axis"));
    }
    if let Some(&n) = sizes.iter().find(|&&n| n < 2 || !n.is_power_of_two()) {
        return Err(Error::domain(format!(
            "grid sizes must be powers of two >= 2, got {n}"
        )));
    }
    Ok(())
}

/// Grid points `θ_j = j / size` in storage order (last axis fastest).
pub fn grid_points(sizes: &[usize]) -> impl Iterator<Item = Vec<f64>> + '_ {
    let total: usize = sizes.iter().product();
    (0..total).map(move |mut flat| {
        let mut p = vec![0.0; sizes.len()];
        for axis in (0..sizes.len()).rev() {
            p[axis] = (flat % sizes[axis]) as f64 / sizes[axis] as f64;
            flat /= sizes[axis];
        }
        p
    })
}

/// In-place unnormalized FFT along every axis.
fn fft_nd(data: &mut [Complex64], sizes: &[usize], direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let mut stride: usize = data.len();
    for &n in sizes {
        stride /= n;
        let fft = planner.plan_fft(n, direction);
        let mut line = vec![Complex64::default(); n];
        let block = n * stride;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, value) in line.iter().enumerate() {
                    data[base + j * stride] = *value;
                }
            }
        }
    }
}

/// Discrete Fourier analysis with the default [`COEFFICIENT_FLOOR`].
pub fn analyze(g: &GridFunction) -> Result<FourierSeries> {
    analyze_with_floor(g, COEFFICIENT_FLOOR)
}

/// Coefficients for the Nyquist box of `g`'s grid. A Nyquist bin (`j = n/2`)
/// is split evenly between `±n/2` so the result stays conjugate-symmetric.
pub fn analyze_with_floor(g: &GridFunction, floor: f64) -> Result<FourierSeries> {
    if let Some(x) = g.samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(format!("non-finite sample {x}")));
    }
    let sizes = &g.sizes;
    let total = g.samples.len();
    let mut data: Vec<Complex64> = g.samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_nd(&mut data, sizes, FftDirection::Forward);

    let scale = 1.0 / total as f64;
    let mut raw: BTreeMap<Mode, Complex64> = BTreeMap::new();
    for (flat, value) in data.iter().enumerate() {
        if value.norm() * scale == 0.0 {
            continue;
        }
        let mut bins = vec![0usize; sizes.len()];
        let mut rest = flat;
        for axis in (0..sizes.len()).rev() {
            bins[axis] = rest % sizes[axis];
            rest /= sizes[axis];
        }
        // each Nyquist axis doubles the number of target modes
        let mut targets: Vec<(Mode, f64)> = vec![(Vec::with_capacity(sizes.len()), 1.0)];
        for (axis, &j) in bins.iter().enumerate() {
            let n = sizes[axis];
            let half = (n / 2) as i64;
            let j = j as i64;
            targets = if j == half {
                targets
                    .into_iter()
                    .flat_map(|(k, w)| {
                        let mut lo = k.clone();
                        lo.push(-half);
                        let mut hi = k;
                        hi.push(half);
                        [(lo, w * 0.5), (hi, w * 0.5)]
                    })
                    .collect()
            } else {
                let freq = if j < half { j } else { j - n as i64 };
                targets
                    .into_iter()
                    .map(|(mut k, w)| {
                        k.push(freq);
                        (k, w)
                    })
                    .collect()
            };
        }
        for (k, w) in targets {
            *raw.entry(k).or_default() += value * scale * w;
        }
    }

    // enforce exact conjugate symmetry, then apply the floor pairwise
    let mut coeffs = BTreeMap::new();
    for (k, c) in &raw {
        let partner = raw.get(&lattice::negate(k)).copied().unwrap_or_default();
        let mut sym = (c + partner.conj()) * 0.5;
        if lattice::is_zero(k) {
            sym.im = 0.0;
        }
        if sym.norm() >= floor {
            coeffs.insert(k.clone(), sym);
        }
    }
    Ok(FourierSeries {
        dim: sizes.len(),
        coeffs,
        real: true,
    })
}

/// Samples a real series on the grid `sizes`. Modes must satisfy
/// `|k_a| <= sizes[a] / 2`; the two Nyquist modes `±n/2` share one bin.
pub fn synthesize(s: &FourierSeries, sizes: &[usize]) -> Result<GridFunction> {
    check_sizes(sizes)?;
    if sizes.len() != s.dim {
        return Err(Error::domain(format!(
            "grid has {} axes, series dimension is {}",
            sizes.len(),
            s.dim
        )));
    }
    if !s.real {
        return Err(Error::domain("synthesize requires a series declared real"));
    }
    let total: usize = sizes.iter().product();
    let mut data = vec![Complex64::default(); total];
    for (k, c) in &s.coeffs {
        let mut flat = 0usize;
        for (axis, &ka) in k.iter().enumerate() {
            let n = sizes[axis] as i64;
            if ka.abs() > n / 2 {
                return Err(Error::Aliasing {
                    mode: k.clone(),
                    sizes: sizes.to_vec(),
                });
            }
            flat = flat * sizes[axis] + ka.rem_euclid(n) as usize;
        }
        data[flat] += c;
    }
    fft_nd(&mut data, sizes, FftDirection::Inverse);
    Ok(GridFunction {
        sizes: sizes.to_vec(),
        samples: data.into_iter().map(|z| z.re).collect(),
    })
}

/// `true` when every mode of `s` satisfies `|k_a| <= sizes[a] / 2`.
pub fn fits_grid(s: &FourierSeries, sizes: &[usize]) -> bool {
    s.iter().all(|(k, _)| {
        k.iter()
            .zip(sizes)
            .all(|(&ka, &n)| ka.unsigned_abs() <= (n / 2) as u64)
    })
}

/// Samples `s` on the grid, by FFT when the support fits and by direct
/// summation otherwise.
pub fn sample_on_grid(s: &FourierSeries, sizes: &[usize]) -> Result<GridFunction> {
    if fits_grid(s, sizes) {
        return synthesize(s, sizes);
    }
    check_sizes(sizes)?;
    let mut samples = Vec::with_capacity(sizes.iter().product());
    for p in grid_points(sizes) {
        samples.push(s.evaluate(&p)?);
    }
    GridFunction::new(sizes.to_vec(), samples)
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    dim: usize,
    #[serde(default = "default_real")]
    real: bool,
    coeffs: Vec<CoeffRepr>,
}

fn default_real() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
struct CoeffRepr {
    k: Vec<i64>,
    re: f64,
    #[serde(default)]
    im: f64,
}

impl TryFrom<SeriesRepr> for FourierSeries {
    type Error = Error;

    fn try_from(r: SeriesRepr) -> Result<Self> {
        FourierSeries::new(
            r.dim,
            r.coeffs
                .into_iter()
                .map(|c| (c.k, Complex64::new(c.re, c.im))),
            r.real,
        )
    }
}

impl From<FourierSeries> for SeriesRepr {
    fn from(s: FourierSeries) -> Self {
        SeriesRepr {
            dim: s.dim,
            real: s.real,
            coeffs: s
                .coeffs
                .into_iter()
                .map(|(k, c)| CoeffRepr {
                    k,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_xoshiro::SplitMix64;

    fn cos_grid(n: usize) -> GridFunction {
        GridFunction::from_fn(vec![n], |t| (TAU * t[0]).cos()).unwrap()
    }

    #[test]
    fn analyze_cosine() {
        let s = analyze(&cos_grid(64)).unwrap();
        assert_abs_diff_eq!(s.coeff(&[1]).re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.coeff(&[-1]).re, 0.5, epsilon = 1e-14);
        for (k, c) in s.iter() {
            if k[0].abs() != 1 {
                assert!(c.norm() < 1e-14, "{k:?} {c}");
            }
        }
        assert!(s.is_real());
    }

    #[test]
    fn analyze_constant() {
        let g = GridFunction::new(vec![8, 4], vec![3.0; 32]).unwrap();
        let s = analyze(&g).unwrap();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(s.coeff(&[0, 0]).re, 3.0, epsilon = 1e-15);
    }

    #[test]
    fn analyze_two_dimensional_sine() {
        let g = GridFunction::from_fn(vec![32, 32], |t| (TAU * (2.0 * t[0] + t[1])).sin()).unwrap();
        let s = analyze(&g).unwrap();
        assert_abs_diff_eq!(s.coeff(&[2, 1]).im, -0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.coeff(&[-2, -1]).im, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.coeff(&[2, 1]).re, 0.0, epsilon = 1e-14);
        let others = s
            .iter()
            .filter(|(k, _)| k.as_slice() != [2, 1] && k.as_slice() != [-2, -1])
            .fold(0.0_f64, |m, (_, c)| m.max(c.norm()));
        assert!(others < 1e-14);
    }

    #[test]
    fn analyze_rejects_non_finite() {
        let g = GridFunction::new(vec![2], vec![1.0, f64::NAN]).unwrap();
        assert!(matches!(analyze(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn grid_sizes_must_be_powers_of_two() {
        assert!(GridFunction::new(vec![6], vec![0.0; 6]).is_err());
        assert!(GridFunction::new(vec![1], vec![0.0]).is_err());
        assert!(GridFunction::new(vec![4], vec![0.0; 3]).is_err());
    }

    #[test]
    fn synthesize_constant_and_cosine() {
        let g = synthesize(&FourierSeries::constant(1, 1.0), &[8]).unwrap();
        assert!(g.samples().iter().all(|&x| (x - 1.0).abs() < 1e-15));
        let cos = FourierSeries::cosine(&[1], 1.0);
        let g = synthesize(&cos, &[8]).unwrap();
        for (p, v) in g.iter() {
            assert_abs_diff_eq!(v, (TAU * p[0]).cos(), epsilon = 1e-15);
        }
    }

    #[test]
    fn synthesize_reports_aliasing() {
        let s = FourierSeries::cosine(&[5], 1.0);
        assert!(matches!(synthesize(&s, &[8]), Err(Error::Aliasing { .. })));
        // the Nyquist pair ±4 is representable on 8 points
        let s = FourierSeries::cosine(&[4], 1.0);
        let g = synthesize(&s, &[8]).unwrap();
        assert_abs_diff_eq!(g.samples()[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn round_trip_band_limited() {
        let mut rng = SplitMix64::seed_from_u64(7);
        for dim in 1..=3 {
            let s = FourierSeries::random_real(dim, 3, &mut rng);
            let sizes = vec![8; dim];
            let back = analyze(&synthesize(&s, &sizes).unwrap()).unwrap();
            assert!(s.max_coefficient_distance(&back) < 1e-12);
        }
    }

    #[test]
    fn evaluate_cosine_series() {
        let cos = FourierSeries::cosine(&[1], 1.0);
        assert_abs_diff_eq!(cos.evaluate(&[0.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cos.evaluate(&[0.25]).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn evaluate_rejects_non_real() {
        let s = FourierSeries::mode(&[1], Complex64::new(1.0, 0.0));
        assert!(s.evaluate(&[0.1]).is_err());
        let err = FourierSeries::new(1, [(vec![1], Complex64::new(1.0, 0.0))], true);
        assert!(matches!(err, Err(Error::NonReal { .. })));
    }

    #[test]
    fn evaluate_matches_dense_synthesis() {
        // oracle: synthesize on a dense grid and read off nodes
        let mut rng = SplitMix64::seed_from_u64(11);
        let s = FourierSeries::random_real(2, 4, &mut rng);
        let g = synthesize(&s, &[64, 64]).unwrap();
        for (p, v) in g.iter().step_by(37) {
            assert_abs_diff_eq!(s.evaluate(&p).unwrap(), v, epsilon = 1e-10);
        }
    }

    #[test]
    fn decay_profiles() {
        let mut rng = SplitMix64::seed_from_u64(3);
        let s = FourierSeries::random_real(2, 3, &mut rng);
        let radii: Vec<u64> = s.decay_profile().iter().map(|p| p.0).collect();
        assert_eq!(radii, vec![0, 1, 2, 3]);
        assert_eq!(FourierSeries::constant(1, -2.0).decay_profile(), vec![(0, 2.0)]);

        // e^{cos 2πθ}: coefficients are modified Bessel values I_k(1), which
        // decay faster than any geometric rate
        let g = GridFunction::from_fn(vec![256], |t| (TAU * t[0]).cos().exp()).unwrap();
        let profile = analyze(&g).unwrap().decay_profile();
        for r in 1..20.min(profile.len() - 1) {
            let (a, b) = (profile[r].1, profile[r + 1].1);
            if a < 1e-14 {
                break;
            }
            assert!(b <= 0.5 * a, "shell {r}: {a} -> {b}");
        }
    }

    #[test]
    fn json_format() {
        let s = FourierSeries::sine(&[1], 2.0);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            r#"{"dim":1,"real":true,"coeffs":[{"k":[-1],"re":0.0,"im":1.0},{"k":[1],"re":0.0,"im":-1.0}]}"#
        );
        let back: FourierSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"dim":2,"real":true,"coeffs":[{"k":[1],"re":1.0,"im":0.0}]}"#;
        assert!(serde_json::from_str::<FourierSeries>(bad).is_err());
    }
}
