//! Real cocycles `Ξ: M × G → R` over `Z`- and `R`-actions on tori, given by
//! their generators.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cohomology::{solve, Case, CohomologySolution};
use crate::diophantine::FrequencyVector;
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::lattice::{self, cis_turns, frac};
use crate::parabolic::ParabolicAffineMap;

/// Largest `|k|∞` a parabolic coboundary may reach before it is truncated.
pub const DEFAULT_SUPPORT_LIMIT: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ActionSpec {
    /// `Z` acting by `θ ↦ θ + α`.
    Rotation { alpha: FrequencyVector },
    /// `R` acting by `θ ↦ θ + tα`.
    LinearFlow { alpha: FrequencyVector },
    /// `Z` acting on `T²` by iterates of a parabolic affine map.
    ParabolicAffine { map: ParabolicAffineMap },
}

impl ActionSpec {
    pub fn dim(&self) -> usize {
        match self {
            ActionSpec::Rotation { alpha } | ActionSpec::LinearFlow { alpha } => alpha.dim(),
            ActionSpec::ParabolicAffine { .. } => 2,
        }
    }

    /// `Z`-actions accept only integer group elements.
    pub fn is_discrete(&self) -> bool {
        !matches!(self, ActionSpec::LinearFlow { .. })
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::domain(format!(
                "point has {} coordinates, the action lives on T^{}",
                p.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn integer_element(&self, g: f64) -> Result<i64> {
        if g.fract() != 0.0 || !g.is_finite() || g.abs() > (1u64 << 53) as f64 {
            return Err(Error::domain(format!("{g} is not an element of Z")));
        }
        Ok(g as i64)
    }

    /// `Γ(p, g)`, reduced mod 1.
    pub fn act(&self, p: &[f64], g: f64) -> Result<Vec<f64>> {
        self.check_point(p)?;
        match self {
            ActionSpec::Rotation { alpha } => {
                let n = self.integer_element(g)?;
                Ok(rotate(p, alpha.components(), n as f64))
            }
            ActionSpec::LinearFlow { alpha } => {
                if !g.is_finite() {
                    return Err(Error::domain("flow time must be finite"));
                }
                Ok(rotate(p, alpha.components(), g))
            }
            ActionSpec::ParabolicAffine { map } => {
                let n = self.integer_element(g)?;
                Ok(map.iterate([p[0], p[1]], n).to_vec())
            }
        }
    }

    /// One step of the `Z`-action, `f^{±1}`.
    fn step(&self, p: &[f64], forward: bool) -> Vec<f64> {
        let sign = if forward { 1.0 } else { -1.0 };
        match self {
            ActionSpec::Rotation { alpha } | ActionSpec::LinearFlow { alpha } => {
                rotate(p, alpha.components(), sign)
            }
            ActionSpec::ParabolicAffine { map } => {
                let step = if forward { *map } else { map.inverse() };
                step.apply([p[0], p[1]]).to_vec()
            }
        }
    }
}

fn rotate(p: &[f64], alpha: &[f64], t: f64) -> Vec<f64> {
    p.iter().zip(alpha).map(|(x, a)| frac(x + t * a)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratedCocycle {
    pub action: ActionSpec,
    /// `ξ(p) = Ξ(p, 1)` for `Z`-actions, `d/dt Ξ(p, t)|_{t=0}` for flows.
    pub generator: FourierSeries,
}

impl GeneratedCocycle {
    pub fn new(action: ActionSpec, generator: FourierSeries) -> Result<Self> {
        let c = GeneratedCocycle { action, generator };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.generator.is_real() {
            return Err(Error::domain("the generator must be a real series"));
        }
        if self.generator.dim() != self.action.dim() {
            return Err(Error::domain(format!(
                "generator lives on T^{} but the action on T^{}",
                self.generator.dim(),
                self.action.dim()
            )));
        }
        Ok(())
    }

    /// `Ξ(p, n)` for a `Z`-action: `Σ_{i<n} ξ(fⁱp)` for `n > 0` and
    /// `-Σ_{n<=i<0} ξ(fⁱp)` for `n < 0`.
    pub fn value_z(&self, p: &[f64], n: i64) -> Result<f64> {
        if !self.action.is_discrete() {
            return Err(Error::domain("integer-time values need a Z-action"));
        }
        self.action.check_point(p)?;
        let mut q: Vec<f64> = p.iter().map(|&x| frac(x)).collect();
        let mut total = 0.0;
        if n >= 0 {
            for _ in 0..n {
                total += self.generator.evaluate(&q)?;
                q = self.action.step(&q, true);
            }
        } else {
            for _ in 0..n.unsigned_abs() {
                q = self.action.step(&q, false);
                total -= self.generator.evaluate(&q)?;
            }
        }
        Ok(total)
    }

    /// `Ξ(p, t) = ∫₀ᵗ ξ(p + sα) ds`, integrated mode by mode.
    pub fn value_r(&self, p: &[f64], t: f64) -> Result<f64> {
        let ActionSpec::LinearFlow { alpha } = &self.action else {
            return Err(Error::domain("real-time values need a linear flow"));
        };
        self.action.check_point(p)?;
        if !t.is_finite() {
            return Err(Error::domain("flow time must be finite"));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (k, &c) in self.generator.iter() {
            let turns = alpha.dot(k) * t;
            // (e^{2πi tk·α} - 1) / (2πi k·α) = t e^{iπ tk·α} sinc(π tk·α)
            let x = 0.5 * TAU * turns;
            let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
            let start = cis_turns(lattice::dot(k, p));
            total += c * start * cis_turns(turns / 2.0) * (t * sinc);
        }
        Ok(total.re)
    }

    /// `Ξ(p, g)` for either kind of action.
    pub fn value(&self, p: &[f64], g: f64) -> Result<f64> {
        if self.action.is_discrete() {
            let n = self.action.integer_element(g)?;
            self.value_z(p, n)
        } else {
            self.value_r(p, g)
        }
    }
}

/// One sample `(p, g₀, g₁)` for the cocycle identity.
pub type Trial = (Vec<f64>, f64, f64);

/// `max |Ξ(p, g₀+g₁) - Ξ(Γ(p, g₀), g₁) - Ξ(p, g₀)|` over the trials.
pub fn verify_cocycle_identity(c: &GeneratedCocycle, trials: &[Trial]) -> Result<f64> {
    identity_violation(
        |p, g| c.action.act(p, g),
        |p, g| c.value(p, g),
        trials,
    )
}

/// The identity check with the action and the cocycle supplied as closures.
pub fn identity_violation(
    act: impl Fn(&[f64], f64) -> Result<Vec<f64>>,
    value: impl Fn(&[f64], f64) -> Result<f64>,
    trials: &[Trial],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (p, g0, g1) in trials {
        let whole = value(p, g0 + g1)?;
        let moved = act(p, *g0)?;
        let split = value(&moved, *g1)? + value(p, *g0)?;
        worst = worst.max((whole - split).abs());
    }
    Ok(worst)
}

/// Uniform points with `g₀, g₁` integers in `[-range, range]` for `Z`-actions
/// and reals in the same interval for flows.
pub fn random_trials<R: Rng + ?Sized>(
    action: &ActionSpec,
    count: usize,
    range: f64,
    rng: &mut R,
) -> Vec<Trial> {
    let bound = range.abs().max(1.0);
    (0..count)
        .map(|_| {
            let p: Vec<f64> = (0..action.dim()).map(|_| rng.random::<f64>()).collect();
            let mut g = || {
                if action.is_discrete() {
                    let b = bound as i64;
                    rng.random_range(-b..=b) as f64
                } else {
                    rng.random_range(-bound..=bound)
                }
            };
            let (g0, g1) = (g(), g());
            (p, g0, g1)
        })
        .collect()
}

pub fn coboundary_from(u: &FourierSeries, action: &ActionSpec) -> Result<GeneratedCocycle> {
    coboundary_from_with(u, action, DEFAULT_SUPPORT_LIMIT)
}

/// The generator of the coboundary of `u`: `u∘f - u` for `Z`-actions and
/// `L_X u` for flows. Parabolic pullbacks whose support exceeds
/// `support_limit` fail with [`Error::SupportOverflow`].
pub fn coboundary_from_with(
    u: &FourierSeries,
    action: &ActionSpec,
    support_limit: u64,
) -> Result<GeneratedCocycle> {
    if !u.is_real() {
        return Err(Error::domain("u must be a real series"));
    }
    if u.dim() != action.dim() {
        return Err(Error::domain(format!(
            "u lives on T^{} but the action on T^{}",
            u.dim(),
            action.dim()
        )));
    }
    let generator = match action {
        ActionSpec::Rotation { alpha } => u.translate(alpha.components()).minus(u)?,
        ActionSpec::LinearFlow { alpha } => u.directional_derivative(alpha.components()),
        ActionSpec::ParabolicAffine { map } => {
            let moved = map.pullback(u)?;
            let tail: f64 = moved
                .iter()
                .filter(|(k, _)| lattice::sup_norm(k) > support_limit)
                .map(|(_, c)| c.norm())
                .sum();
            if tail > 0.0 {
                return Err(Error::SupportOverflow { tail_bound: tail });
            }
            moved.minus(u)?
        }
    };
    let generator = generator.pruned(f64::MIN_POSITIVE);
    GeneratedCocycle::new(action.clone(), generator)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cohomologous {
    /// `u` with `ξ - θ = u∘f - u + gap` (or `L_X u + gap`).
    pub transfer: CohomologySolution,
    pub gap: f64,
}

/// Decides whether `xi - theta` is a coboundary plus a constant, returning the
/// transfer function. Resonant frequencies carrying mass give
/// [`Error::Obstructed`].
pub fn are_cohomologous(
    xi: &GeneratedCocycle,
    theta: &GeneratedCocycle,
    divisor_floor: f64,
) -> Result<Cohomologous> {
    if xi.action != theta.action {
        return Err(Error::domain("the cocycles live over different actions"));
    }
    let (alpha, case) = match &xi.action {
        ActionSpec::Rotation { alpha } => (alpha, Case::Map),
        ActionSpec::LinearFlow { alpha } => (alpha, Case::Flow),
        ActionSpec::ParabolicAffine { .. } => {
            return Err(Error::domain(
                "cohomology over parabolic maps is handled by the parabolic module",
            ))
        }
    };
    let difference = xi.generator.minus(&theta.generator)?.pruned(f64::MIN_POSITIVE);
    let transfer = solve(&difference, alpha, divisor_floor, case)?.into_complete()?;
    let gap = transfer.c;
    Ok(Cohomologous { transfer, gap })
}
