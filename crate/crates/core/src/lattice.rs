//! Small helpers for integer lattice points `k ∈ Z^d`.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `|k|∞`
pub fn sup_norm(k: &[i64]) -> u64 {
    k.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

pub fn is_zero(k: &[i64]) -> bool {
    k.iter().all(|&x| x == 0)
}

/// Representative of `{k, -k}` whose first nonzero coordinate is positive.
pub fn is_canonical(k: &[i64]) -> bool {
    k.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

pub fn canonical(k: &[i64]) -> Vec<i64> {
    if is_canonical(k) || is_zero(k) {
        k.to_vec()
    } else {
        negate(k)
    }
}

pub fn negate(k: &[i64]) -> Vec<i64> {
    k.iter().map(|x| -x).collect()
}

pub fn dot(k: &[i64], v: &[f64]) -> f64 {
    k.iter().zip(v).map(|(&a, &b)| a as f64 * b).sum()
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let r = x - x.floor();
    // x - floor(x) can round up to exactly 1.0 for tiny negative x
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance on the circle `R/Z`.
#[inline]
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

/// `e^{2πi x}`, with `x` reduced to `[-1/2, 1/2]` first so large arguments keep
/// their phase accuracy.
#[inline]
pub fn cis_turns(x: f64) -> Complex64 {
    let r = x - x.round();
    Complex64::from_polar(1.0, TAU * r)
}

/// All lattice points with `|k|∞ <= radius`, in lexicographic order.
pub fn box_points(dim: usize, radius: u64) -> BoxIter {
    BoxIter::new(dim, radius)
}

pub struct BoxIter {
    radius: i64,
    current: Option<Vec<i64>>,
}

impl BoxIter {
    fn new(dim: usize, radius: u64) -> Self {
        let radius = radius as i64;
        BoxIter {
            radius,
            current: Some(vec![-radius; dim]),
        }
    }
}

impl Iterator for BoxIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut axis = next.len();
        while axis > 0 {
            axis -= 1;
            if next[axis] < self.radius {
                next[axis] += 1;
                self.current = Some(next);
                return Some(out);
            }
            next[axis] = -self.radius;
        }
        // odometer wrapped: `out` was the last point (the empty box yields once)
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_enumeration_is_lexicographic_and_complete() {
        let pts: Vec<_> = box_points(2, 1).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts.first().unwrap(), &vec![-1, -1]);
        assert_eq!(pts.last().unwrap(), &vec![1, 1]);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(box_points(0, 3).count(), 1);
        assert_eq!(box_points(3, 2).count(), 125);
    }

    #[test]
    fn canonical_representatives() {
        assert!(is_canonical(&[0, 2, -1]));
        assert!(!is_canonical(&[0, -2, 1]));
        assert!(!is_canonical(&[0, 0]));
        assert_eq!(canonical(&[-1, 2]), vec![1, -2]);
    }

    #[test]
    fn frac_stays_in_unit_interval() {
        assert_eq!(frac(-1e-300), 0.0);
        assert_eq!(frac(2.25), 0.25);
        assert!((frac(-0.25) - 0.75).abs() < 1e-15);
        assert!((circle_distance(0.95, 0.05) - 0.1).abs() < 1e-12);
    }
}
