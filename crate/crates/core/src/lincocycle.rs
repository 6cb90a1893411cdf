//! `SL(2,R)`-valued cocycles over a circle rotation `x ↦ x + ρ`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::cohomology::solve_map;
use crate::diophantine::FrequencyVector;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::lattice::frac;
use crate::stats::linear_fit;

/// Grid used for determinant and conjugacy checks.
pub const CHECK_GRID: usize = 1024;
/// Largest tolerated `|det G(x) - 1|` for determinant-one cocycles.
pub const DET_TOLERANCE: f64 = 1e-10;
const RENORMALIZE_EVERY: u64 = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearCocycle {
    pub base_rho: f64,
    /// Matrix entries of the generator, row-major, each a real series on `T¹`.
    pub generator: [[FourierSeries; 2]; 2],
    #[serde(default)]
    pub det_constraint: bool,
}

impl LinearCocycle {
    pub fn new(base_rho: f64, generator: [[FourierSeries; 2]; 2], det_constraint: bool) -> Result<Self> {
        let c = LinearCocycle {
            base_rho,
            generator,
            det_constraint,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn constant(base_rho: f64, m: [[f64; 2]; 2], det_constraint: bool) -> Result<Self> {
        let entry = |v: f64| FourierSeries::constant(1, v);
        Self::new(
            base_rho,
            [
                [entry(m[0][0]), entry(m[0][1])],
                [entry(m[1][0]), entry(m[1][1])],
            ],
            det_constraint,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !self.base_rho.is_finite() {
            return Err(Error::domain("base rotation must be finite"));
        }
        for s in self.generator.iter().flatten() {
            if s.dim() != 1 || !s.is_real() {
                return Err(Error::domain("generator entries must be real series on T¹"));
            }
        }
        if self.det_constraint {
            let worst = self.determinant_defect()?;
            if worst > DET_TOLERANCE {
                return Err(Error::domain(format!(
                    "generator determinant deviates from 1 by {worst:e}"
                )));
            }
        }
        Ok(())
    }

    /// `max |det G(x) - 1|` over the check grid.
    pub fn determinant_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for j in 0..CHECK_GRID {
            let g = self.at(j as f64 / CHECK_GRID as f64)?;
            worst = worst.max((g.determinant() - 1.0).abs());
        }
        Ok(worst)
    }

    /// `G(x)`
    pub fn at(&self, x: f64) -> Result<Matrix2<f64>> {
        let e = |i: usize, j: usize| self.generator[i][j].evaluate(&[x]);
        Ok(Matrix2::new(e(0, 0)?, e(0, 1)?, e(1, 0)?, e(1, 1)?))
    }

    fn point(&self, x: f64, i: i64) -> f64 {
        frac(x + i as f64 * self.base_rho)
    }

    fn inverse_at(&self, x: f64) -> Result<Matrix2<f64>> {
        let g = self.at(x)?;
        let det = g.determinant();
        if det.abs() < 1e-14 {
            return Err(Error::Singular { det });
        }
        Ok(Matrix2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]) / det)
    }

    /// `A(x, n) = G(x + (n-1)ρ) ⋯ G(x)` for `n >= 0` and
    /// `G(x + nρ)⁻¹ ⋯ G(x - ρ)⁻¹` for `n < 0`.
    pub fn iterate(&self, x: f64, n: i64) -> Result<Matrix2<f64>> {
        let mut m = Matrix2::identity();
        if n >= 0 {
            for i in 0..n {
                m = self.at(self.point(x, i))? * m;
            }
        } else {
            for i in 1..=n.unsigned_abs() as i64 {
                m = self.inverse_at(self.point(x, -i))? * m;
            }
        }
        Ok(m)
    }

    /// Finite-time top exponent `(1/n) log ‖A(x₀, n)‖₂`.
    pub fn lyapunov_exponent(&self, x0: f64, n: u64) -> Result<f64> {
        if n < 100 {
            return Err(Error::domain("the exponent estimate needs n >= 100"));
        }
        let mut m = Matrix2::identity();
        let mut log_scale = 0.0;
        for i in 0..n {
            m = self.at(self.point(x0, i as i64))? * m;
            if (i + 1) % RENORMALIZE_EVERY == 0 {
                let s = m.abs().max();
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Overflow(format!("product norm {s} at step {}", i + 1)));
                }
                m /= s;
                log_scale += s.ln();
            }
        }
        let top = spectral_norm(&m);
        if !(top.is_finite() && top > 0.0) {
            return Err(Error::Overflow(format!("final product norm {top}")));
        }
        Ok((log_scale + top.ln()) / n as f64)
    }

    /// Unit directions at angles `jπ/directions` whose images stay bounded by
    /// `bound` for all `|t| <= n`.
    pub fn quasi_anosov_probe(&self, x0: f64, directions: usize, n: u64, bound: f64) -> Result<ProbeReport> {
        if directions < 8 {
            return Err(Error::domain("the probe needs at least 8 directions"));
        }
        let angles: Vec<f64> = (0..directions).map(|j| j as f64 * PI / directions as f64).collect();
        let vectors: Vec<Vector2<f64>> = angles.iter().map(|a| Vector2::new(a.cos(), a.sin())).collect();
        let mut peaks = vec![1.0f64; directions];
        for forward in [true, false] {
            let mut m = Matrix2::identity();
            for i in 0..n as i64 {
                m = if forward {
                    self.at(self.point(x0, i))? * m
                } else {
                    self.inverse_at(self.point(x0, -i - 1))? * m
                };
                for (peak, v) in peaks.iter_mut().zip(&vectors) {
                    *peak = peak.max((m * v).norm());
                }
            }
        }
        let survivors = angles
            .iter()
            .zip(&peaks)
            .filter(|(_, &p)| p <= bound)
            .map(|(&a, _)| a)
            .collect();
        Ok(ProbeReport {
            angles,
            peaks,
            survivors,
        })
    }
}

fn spectral_norm(m: &Matrix2<f64>) -> f64 {
    m.singular_values().max()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub angles: Vec<f64>,
    /// `max_{|t| <= n} ‖A(x₀, t) v‖` per direction.
    pub peaks: Vec<f64>,
    /// Angles whose peak stayed within the bound.
    pub survivors: Vec<f64>,
}

/// The cocycle `[[1, a(x)], [0, 1]]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangularCocycle {
    pub a: FourierSeries,
    pub base_rho: f64,
}

impl TriangularCocycle {
    pub fn new(a: FourierSeries, base_rho: f64) -> Result<Self> {
        if a.dim() != 1 || !a.is_real() {
            return Err(Error::domain("a must be a real series on T¹"));
        }
        if !base_rho.is_finite() {
            return Err(Error::domain("base rotation must be finite"));
        }
        Ok(TriangularCocycle { a, base_rho })
    }

    pub fn to_linear(&self) -> LinearCocycle {
        LinearCocycle {
            base_rho: self.base_rho,
            generator: [
                [FourierSeries::constant(1, 1.0), self.a.clone()],
                [FourierSeries::zero(1), FourierSeries::constant(1, 1.0)],
            ],
            det_constraint: true,
        }
    }

    /// Solves `b(x + ρ) - b(x) = ā - a(x)`, so that `H(x) = [[1, b(x)], [0, 1]]`
    /// conjugates the cocycle to the constant `[[1, ā], [0, 1]]`.
    pub fn reduce_to_normal_form(&self, divisor_floor: f64) -> Result<NormalForm> {
        let a_bar = self.a.mean();
        let rho = FrequencyVector::new(vec![self.base_rho])?;
        let rhs = self.a.shifted_by_constant(-a_bar).scaled(-1.0);
        let b = solve_map(&rhs, &rho, divisor_floor)?.into_complete()?.u;
        let target = Matrix2::new(1.0, a_bar, 0.0, 1.0);
        let linear = self.to_linear();
        let h = |x: f64| -> Result<Matrix2<f64>> { Ok(Matrix2::new(1.0, b.evaluate(&[x])?, 0.0, 1.0)) };
        let mut residual: f64 = 0.0;
        for j in 0..CHECK_GRID {
            let x = j as f64 / CHECK_GRID as f64;
            let h_inv = h(x)?.try_inverse().ok_or(Error::Singular { det: 0.0 })?;
            let conj = h(frac(x + self.base_rho))? * linear.at(x)? * h_inv;
            residual = residual.max((conj - target).abs().max());
        }
        Ok(NormalForm { b, a_bar, residual })
    }

    /// Slope of `n ↦ ‖A(x₀, n)(0, 1)ᵀ‖` fitted over `n_max/2 <= n <= n_max`.
    pub fn parabolic_growth(&self, x0: f64, n_max: u64) -> Result<f64> {
        if n_max < 2 {
            return Err(Error::domain("growth fit needs n_max >= 2"));
        }
        let mut top = 0.0;
        let (mut ns, mut norms) = (Vec::new(), Vec::new());
        for n in 1..=n_max {
            top += self.a.evaluate(&[frac(x0 + (n - 1) as f64 * self.base_rho)])?;
            if 2 * n >= n_max {
                ns.push(n as f64);
                norms.push(top.hypot(1.0));
            }
        }
        Ok(linear_fit(&ns, &norms).0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub b: FourierSeries,
    pub a_bar: f64,
    /// `max_x |H(x+ρ) G(x) H(x)⁻¹ - [[1, ā], [0, 1]]|` on the check grid.
    pub residual: f64,
}

impl NormalForm {
    pub fn constant_cocycle(&self, base_rho: f64) -> LinearCocycle {
        LinearCocycle::constant(base_rho, [[1.0, self.a_bar], [0.0, 1.0]], true)
            .expect("unipotent matrices have determinant one")
    }
}
