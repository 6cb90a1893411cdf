//! Finite-radius certification of Diophantine conditions
//! `|p·α| > C |p|∞^{-τ}` and continued fractions.
//!
//! Box scans are exact over `0 < |p|∞ <= N` but do not visit every point: for
//! a fixed "tail" (all coordinates except the pivot, the one with the largest
//! `|α_i|`) the margin is a function of one integer `x` whose minimum over an
//! interval is attained at an interval end, at `floor r`/`ceil r` (with `r`
//! the real root of `p·α`), at `0`, or at `±|tail|∞`. Only those candidates
//! are evaluated, which makes `d = 2` scans linear in `N`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::Mode;
use crate::lattice;
use crate::stats::linear_fit;

/// `|p·α|` below this is a rational resonance rather than rounding noise.
pub const DEFAULT_RESONANCE_THRESHOLD: f64 = 1e-14;
/// Continued fractions stop once a partial quotient would exceed this.
pub const DEFAULT_CF_OVERFLOW_BOUND: f64 = 1e12;

/// Frequency vector `α ∈ R^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FrequencyVector {
    components: Vec<f64>,
}

impl FrequencyVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("frequency vector must have dimension >= 1"));
        }
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("frequency vector has non-finite components"));
        }
        Ok(FrequencyVector { components })
    }

    /// Parses `"1,1.618"`.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let parsed: std::result::Result<Vec<f64>, _> =
            text.split(',').map(|s| s.trim().parse::<f64>()).collect();
        Self::new(parsed.map_err(|e| Error::domain(format!("bad frequency list {text:?}: {e}")))?)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn dot(&self, k: &[i64]) -> f64 {
        lattice::dot(k, &self.components)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.components.iter().map(|x| x * factor).collect())
    }

    /// Fails with the smallest witness when `k·α` vanishes for some
    /// `0 < |k|∞ <= radius`.
    pub fn check_rational_independence(&self, radius: u64) -> Result<()> {
        scan_box(&self.components, radius, 0.0, DEFAULT_RESONANCE_THRESHOLD).map(|_| ())
    }
}

impl TryFrom<Vec<f64>> for FrequencyVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FrequencyVector> for Vec<f64> {
    fn from(f: FrequencyVector) -> Self {
        f.components
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiophantineCertificate {
    #[serde(rename = "C")]
    pub c: f64,
    pub tau: f64,
    pub radius: u64,
    /// Canonical representative (first nonzero coordinate positive).
    pub worst_point: Mode,
    /// `min |p·α| |p|∞^τ` over the scanned box.
    pub worst_margin: f64,
    /// The same minimum restricted to the outer shell `N/2 < |p|∞ <= N`;
    /// approximates the liminf of the margin.
    pub tail_margin: f64,
    pub holds: bool,
}

/// Ordering on candidate worst points: margin, then `|p|∞`, then lexicographic.
fn candidate_order(a: (f64, &[i64]), b: (f64, &[i64])) -> Ordering {
    a.0.total_cmp(&b.0)
        .then_with(|| lattice::sup_norm(a.1).cmp(&lattice::sup_norm(b.1)))
        .then_with(|| a.1.cmp(b.1))
}

struct Best {
    margin: f64,
    point: Mode,
}

impl Best {
    fn offer(slot: &mut Option<Best>, margin: f64, point: &[i64]) {
        let better = match slot {
            None => true,
            Some(b) => candidate_order((margin, point), (b.margin, &b.point)) == Ordering::Less,
        };
        if better {
            *slot = Some(Best {
                margin,
                point: point.to_vec(),
            });
        }
    }
}

struct BoxScan {
    worst: Best,
    tail: Option<Best>,
}

/// Exact minimum of `|p·α| |p|∞^τ` over `0 < |p|∞ <= radius`.
fn scan_box(alpha: &[f64], radius: u64, tau: f64, threshold: f64) -> Result<BoxScan> {
    let d = alpha.len();
    let n = radius as i64;
    let half = n / 2;
    let pivot = (0..d)
        .max_by(|&i, &j| alpha[i].abs().total_cmp(&alpha[j].abs()).then(j.cmp(&i)))
        .expect("nonempty");
    let a_piv = alpha[pivot];

    let mut worst: Option<Best> = None;
    let mut tail_best: Option<Best> = None;
    let mut resonance: Option<Best> = None;
    let mut p = vec![0i64; d];
    let mut canon = vec![0i64; d];

    let mut visit = |p: &mut Vec<i64>,
                     x: i64,
                     tail_dot: f64,
                     tail_norm: u64,
                     worst: &mut Option<Best>,
                     tail_best: &mut Option<Best>,
                     resonance: &mut Option<Best>,
                     in_tail_shell: bool| {
        if x == 0 && tail_norm == 0 {
            return;
        }
        p[pivot] = x;
        let value = (a_piv * x as f64 + tail_dot).abs();
        let norm = tail_norm.max(x.unsigned_abs());
        canon.clear();
        canon.extend_from_slice(p);
        if !lattice::is_canonical(&canon) {
            canon.iter_mut().for_each(|c| *c = -*c);
        }
        if value < threshold {
            // resonances are ranked by size alone
            Best::offer(resonance, 0.0, &canon);
        }
        let margin = value * (norm as f64).powf(tau);
        if in_tail_shell {
            Best::offer(tail_best, margin, &canon);
        } else {
            Best::offer(worst, margin, &canon);
        }
    };

    // candidate set for x in [lo, hi]
    let candidates = |lo: i64, hi: i64, root: f64, m: i64| -> Vec<i64> {
        let fl = root.floor().clamp(lo as f64, hi as f64) as i64;
        let ce = root.ceil().clamp(lo as f64, hi as f64) as i64;
        let mut c = vec![lo, hi, fl, ce, 0, 1, -1, m, -m];
        c.retain(|&x| x >= lo && x <= hi);
        c.sort_unstable();
        c.dedup();
        c
    };

    let tail_dims = d - 1;
    for tail in lattice::box_points(tail_dims, radius) {
        let tail_norm = lattice::sup_norm(&tail);
        if tail_norm != 0 && !lattice::is_canonical(&tail) {
            continue;
        }
        let mut it = tail.iter();
        let mut tail_dot = 0.0;
        for (i, slot) in p.iter_mut().enumerate() {
            if i != pivot {
                *slot = *it.next().unwrap();
                tail_dot += alpha[i] * *slot as f64;
            }
        }
        let root = if a_piv != 0.0 { -tail_dot / a_piv } else { 0.0 };
        let m = tail_norm as i64;

        for x in candidates(-n, n, root, m) {
            visit(&mut p, x, tail_dot, tail_norm, &mut worst, &mut tail_best, &mut resonance, false);
        }
        if m > half {
            for x in candidates(-n, n, root, m) {
                visit(&mut p, x, tail_dot, tail_norm, &mut worst, &mut tail_best, &mut resonance, true);
            }
        } else {
            for x in candidates(half + 1, n, root, m)
                .into_iter()
                .chain(candidates(-n, -half - 1, root, m))
            {
                visit(&mut p, x, tail_dot, tail_norm, &mut worst, &mut tail_best, &mut resonance, true);
            }
        }
    }

    if let Some(r) = resonance {
        let value = lattice::dot(&r.point, alpha).abs();
        return Err(Error::Resonance {
            witness: r.point,
            value,
        });
    }
    Ok(BoxScan {
        worst: worst.expect("radius >= 1 has at least one point"),
        tail: tail_best,
    })
}

pub fn check_diophantine(
    alpha: &FrequencyVector,
    c: f64,
    tau: f64,
    radius: u64,
) -> Result<DiophantineCertificate> {
    check_diophantine_with(alpha, c, tau, radius, DEFAULT_RESONANCE_THRESHOLD)
}

/// Scans `0 < |p|∞ <= radius` for the smallest `|p·α| |p|∞^τ`; the condition
/// holds up to the radius iff that margin exceeds `c`.
pub fn check_diophantine_with(
    alpha: &FrequencyVector,
    c: f64,
    tau: f64,
    radius: u64,
    resonance_threshold: f64,
) -> Result<DiophantineCertificate> {
    if !(c > 0.0 && tau > 0.0) {
        return Err(Error::domain(format!("need C > 0 and tau > 0, got C={c}, tau={tau}")));
    }
    if radius == 0 {
        return Err(Error::domain("scan radius must be >= 1"));
    }
    let scan = scan_box(alpha.components(), radius, tau, resonance_threshold)?;
    let tail_margin = scan.tail.map_or(scan.worst.margin, |t| t.margin);
    Ok(DiophantineCertificate {
        c,
        tau,
        radius,
        holds: scan.worst.margin > c,
        worst_point: scan.worst.point,
        worst_margin: scan.worst.margin,
        tail_margin,
    })
}

/// One-dimensional condition `|m + n α₁/α₀| >= C' |n|^{-τ}` with `m` the nearest
/// integer to `-n α₁/α₀`, for `0 < n <= radius` (`n → -n` is symmetric). The
/// certificate's `worst_point` is `(m, n)` and `worst_margin` the largest
/// admissible `C'`.
pub fn ratio_condition(
    alpha0: f64,
    alpha1: f64,
    c: f64,
    tau: f64,
    radius: u64,
) -> Result<DiophantineCertificate> {
    if alpha0 == 0.0 || !alpha0.is_finite() || !alpha1.is_finite() {
        return Err(Error::domain("ratio condition needs finite alpha0 != 0 and alpha1"));
    }
    if radius == 0 {
        return Err(Error::domain("scan radius must be >= 1"));
    }
    let ratio = alpha1 / alpha0;
    let mut worst = (f64::INFINITY, vec![0, 0]);
    let mut tail = f64::INFINITY;
    for n in 1..=radius as i64 {
        let nr = n as f64 * ratio;
        let m = (-nr).round();
        let gap = (m + nr).abs();
        if gap < DEFAULT_RESONANCE_THRESHOLD {
            return Err(Error::Resonance {
                witness: vec![m as i64, n],
                value: gap,
            });
        }
        let margin = gap * (n as f64).powf(tau);
        if margin < worst.0 {
            worst = (margin, vec![m as i64, n]);
        }
        if n > radius as i64 / 2 {
            tail = tail.min(margin);
        }
    }
    Ok(DiophantineCertificate {
        c,
        tau,
        radius,
        holds: worst.0 > c,
        worst_point: worst.1,
        worst_margin: worst.0,
        tail_margin: tail,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    /// `[a₀; a₁, …, a_n]`
    pub partial_quotients: Vec<i64>,
    /// `(p_k, q_k)` with `p_k/q_k = [a₀; …, a_k]`.
    pub convergents: Vec<(i64, i64)>,
    /// The expansion ended before `n_terms` because the remainder vanished at
    /// working precision.
    pub effectively_rational: bool,
}

pub fn continued_fraction(x: f64, n_terms: usize) -> Result<ContinuedFraction> {
    continued_fraction_with(x, n_terms, DEFAULT_CF_OVERFLOW_BOUND)
}

pub fn continued_fraction_with(x: f64, n_terms: usize, overflow_bound: f64) -> Result<ContinuedFraction> {
    if !x.is_finite() {
        return Err(Error::domain("continued fraction of a non-finite number"));
    }
    if n_terms == 0 {
        return Err(Error::domain("need at least one term"));
    }
    if x.abs() > overflow_bound {
        return Err(Error::domain(format!("|x| exceeds the overflow bound {overflow_bound:e}")));
    }
    let mut quotients = Vec::with_capacity(n_terms);
    let mut convergents = Vec::with_capacity(n_terms);
    let (mut p_prev, mut p_prev2) = (1i64, 0i64);
    let (mut q_prev, mut q_prev2) = (0i64, 1i64);
    let mut y = x;
    let mut effectively_rational = false;
    loop {
        let nearest = y.round();
        // snap values that sit within rounding of an integer
        let a = if (y - nearest).abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0) {
            nearest
        } else {
            y.floor()
        };
        let ai = a as i64;
        let next = ai
            .checked_mul(p_prev)
            .and_then(|v| v.checked_add(p_prev2))
            .zip(ai.checked_mul(q_prev).and_then(|v| v.checked_add(q_prev2)));
        let Some((p, q)) = next else {
            effectively_rational = true;
            break;
        };
        quotients.push(ai);
        convergents.push((p, q));
        (p_prev2, p_prev) = (p_prev, p);
        (q_prev2, q_prev) = (q_prev, q);
        if quotients.len() == n_terms {
            break;
        }
        let f = y - a;
        if f <= 0.0 || 1.0 / f > overflow_bound {
            effectively_rational = true;
            break;
        }
        y = 1.0 / f;
    }
    Ok(ContinuedFraction {
        partial_quotients: quotients,
        convergents,
        effectively_rational,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub tau_hat: f64,
    pub c_hat: f64,
    /// `(R, min_{0<|p|∞<=R} |p·α|)` at dyadic radii.
    pub samples: Vec<(u64, f64)>,
    /// `false` when the fitted exponent exceeds the dimension, far above the
    /// generic value `d - 1`.
    pub diophantine_plausible: bool,
}

/// Least-squares fit of `log min_{|p|∞<=R} |p·α|` against `log R` over dyadic
/// `R <= radius`; `τ̂` is minus the slope and `Ĉ` the exponential of the
/// intercept.
pub fn estimate_exponent(alpha: &FrequencyVector, radius: u64) -> Result<ExponentFit> {
    if radius < 10 {
        return Err(Error::domain("estimate_exponent needs radius >= 10"));
    }
    let mut samples = Vec::new();
    let mut r = 1u64;
    while r <= radius {
        let scan = scan_box(alpha.components(), r, 0.0, DEFAULT_RESONANCE_THRESHOLD)?;
        samples.push((r, scan.worst.margin));
        r *= 2;
    }
    let xs: Vec<f64> = samples.iter().map(|s| (s.0 as f64).ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let (slope, intercept) = linear_fit(&xs, &ys);
    let tau_hat = -slope;
    Ok(ExponentFit {
        tau_hat,
        c_hat: intercept.exp(),
        samples,
        diophantine_plausible: tau_hat <= alpha.dim() as f64,
    })
}
