//! End-to-end demo: a skew product over a rotation is linearized to a
//! parabolic affine map, whose invariant distributions and their suspension
//! are then checked numerically.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::diophantine::{estimate_exponent, FrequencyVector};
use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::lattice::circle_distance;
use crate::parabolic::{
    independence_matrix, slice, suspension_pair_with, transported, verify_invariance,
    InvariantDistributionIndex, ParabolicAffineMap, SuspensionSpec,
};
use crate::skewproduct::SkewProductMap;

/// Residuals above this fail the demo.
pub const DEMO_TOLERANCE: f64 = 1e-8;
pub const GOLDEN_ROTATION: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoOptions {
    pub seed: u64,
    pub n0: i64,
    pub rho: f64,
    /// Largest lattice radius scanned when certifying `ρ`.
    pub certify_radius: u64,
    pub divisor_floor: f64,
    pub quadrature_tolerance: f64,
}

impl DemoOptions {
    pub fn new(seed: u64) -> Self {
        DemoOptions {
            seed,
            n0: 1,
            rho: GOLDEN_ROTATION,
            certify_radius: 1 << 20,
            divisor_floor: crate::cohomology::DEFAULT_DIVISOR_FLOOR,
            quadrature_tolerance: crate::parabolic::DEFAULT_QUADRATURE_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    /// `(label, value)` lines, already formatted.
    pub facts: Vec<(String, String)>,
    /// Quantities that must stay below [`DEMO_TOLERANCE`].
    pub residuals: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl Stage {
    fn new(name: &str) -> Self {
        Stage {
            name: name.to_string(),
            facts: Vec::new(),
            residuals: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn fact(&mut self, label: &str, value: impl std::fmt::Display) {
        self.facts.push((label.to_string(), value.to_string()));
    }

    fn residual(&mut self, label: &str, value: f64) {
        self.residuals.push((label.to_string(), value));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub stage: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub options: DemoOptions,
    pub stages: Vec<Stage>,
    pub obstruction: Option<Obstruction>,
    pub max_residual: f64,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.obstruction.is_none() && self.max_residual <= DEMO_TOLERANCE
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let o = &self.options;
        let _ = writeln!(s, "# Reduction pipeline report\n");
        let _ = writeln!(s, "- seed: {}", o.seed);
        let _ = writeln!(s, "- n0: {}", o.n0);
        let _ = writeln!(s, "- rho: {}", o.rho);
        for (i, stage) in self.stages.iter().enumerate() {
            let _ = writeln!(s, "\n## {}. {}\n", i + 1, stage.name);
            for (label, value) in &stage.facts {
                let _ = writeln!(s, "- {label}: {value}");
            }
            for (label, value) in &stage.residuals {
                let _ = writeln!(s, "- {label}: {value:.3e}");
            }
            for note in &stage.notes {
                let _ = writeln!(s, "- note: {note}");
            }
        }
        let _ = writeln!(s, "\n## Summary\n");
        match &self.obstruction {
            Some(ob) => {
                let _ = writeln!(s, "- status: obstructed at stage \"{}\"", ob.stage);
                let _ = writeln!(s, "- reason: {}", ob.reason);
            }
            None => {
                let verdict = if self.passed() { "ok" } else { "residual above tolerance" };
                let _ = writeln!(s, "- status: {verdict}");
            }
        }
        let _ = writeln!(s, "- max residual: {:.3e} (tolerance {DEMO_TOLERANCE:.0e})", self.max_residual);
        s
    }
}

fn obstructed(report: &mut PipelineReport, stage: Stage, reason: String) {
    report.obstruction = Some(Obstruction {
        stage: stage.name.clone(),
        reason,
    });
    report.stages.push(stage);
}

fn finish(mut report: PipelineReport) -> PipelineReport {
    report.max_residual = report
        .stages
        .iter()
        .flat_map(|s| s.residuals.iter().map(|r| r.1))
        .fold(0.0, f64::max);
    report
}

fn centered_random(dim: usize, radius: u64, rng: &mut SplitMix64) -> FourierSeries {
    let s = FourierSeries::random_real(dim, radius, rng);
    s.shifted_by_constant(-s.mean()).pruned(f64::MIN_POSITIVE)
}

pub fn pipeline_demo(options: &DemoOptions) -> Result<PipelineReport> {
    let mut rng = SplitMix64::seed_from_u64(options.seed);
    let mut report = PipelineReport {
        options: options.clone(),
        stages: Vec::new(),
        obstruction: None,
        max_residual: 0.0,
    };
    let rho = options.rho;

    let mut stage = Stage::new("base rotation certificate");
    let alpha = FrequencyVector::new(vec![1.0, rho])?;
    match estimate_exponent(&alpha, options.certify_radius) {
        Ok(fit) => {
            stage.fact("scan radius", options.certify_radius);
            stage.fact("tau_hat", format!("{:.4}", fit.tau_hat));
            stage.fact("C_hat", format!("{:.4e}", fit.c_hat));
            if !fit.diophantine_plausible {
                let reason = format!("fitted exponent {:.3} exceeds the dimension", fit.tau_hat);
                obstructed(&mut report, stage, reason);
                return Ok(finish(report));
            }
        }
        Err(e) if e.is_obstruction() => {
            obstructed(&mut report, stage, e.to_string());
            return Ok(finish(report));
        }
        Err(e) => return Err(e),
    }
    report.stages.push(stage);

    let mut stage = Stage::new("skew-product linearization");
    let zeta0 = centered_random(1, 4, &mut rng);
    let beta: f64 = rng.random();
    let chi = zeta0
        .translate(&[rho])
        .minus(&zeta0)?
        .shifted_by_constant(beta);
    let skew = SkewProductMap::new(rho, options.n0, chi)?;
    let lin = match skew.linearize(options.divisor_floor) {
        Ok(lin) => lin,
        Err(e) if e.is_obstruction() => {
            obstructed(&mut report, stage, e.to_string());
            return Ok(finish(report));
        }
        Err(e) => return Err(e),
    };
    stage.fact("beta", format!("{:.12}", lin.beta));
    stage.fact("zeta modes", lin.zeta.len());
    stage.residual("conjugacy residual on 256x256 grid", lin.residual);
    stage.residual("zeta recovery error", lin.zeta.max_coefficient_distance(&zeta0));
    stage.residual("beta recovery error", (lin.beta - beta).abs());
    report.stages.push(stage);

    let mut stage = Stage::new("affine normal form");
    let affine = ParabolicAffineMap::new(options.n0, rho, lin.beta)?;
    let (mut inverse_gap, mut conj_gap): (f64, f64) = (0.0, 0.0);
    for _ in 0..64 {
        let theta = [rng.random::<f64>(), rng.random::<f64>()];
        let back = affine.inverse().apply(affine.apply(theta));
        inverse_gap = inverse_gap
            .max(circle_distance(back[0], theta[0]))
            .max(circle_distance(back[1], theta[1]));
        let lifted = [theta[0], theta[1] + lin.zeta.evaluate(&[theta[0]])?];
        let moved = skew.apply(lifted)?;
        let conj = [moved[0], moved[1] - lin.zeta.evaluate(&[moved[0]])?];
        let target = affine.apply(theta);
        conj_gap = conj_gap
            .max(circle_distance(conj[0], target[0]))
            .max(circle_distance(conj[1], target[1]));
    }
    stage.fact("map", format!("(n0, rho, beta) = ({}, {:.12}, {:.12})", affine.n0, affine.rho, affine.beta));
    stage.residual("B after its inverse, 64 random points", inverse_gap);
    stage.residual("conjugated skew product vs B, 64 random points", conj_gap);
    report.stages.push(stage);

    if options.n0 == 0 {
        let mut stage = Stage::new("invariant distributions");
        stage.notes.push("torus case, no nontrivial T_m line".to_string());
        report.stages.push(stage);
        return Ok(finish(report));
    }

    let mut stage = Stage::new("invariant distributions");
    let mut worst_gap: f64 = 0.0;
    let cases = 60;
    for i in 0..cases {
        let m = [1, -1, 2, -2, 3, -3][i % 6];
        let psi = FourierSeries::random_real(2, 8, &mut rng);
        let idx = InvariantDistributionIndex::new(m, 1)?;
        worst_gap = worst_gap.max(verify_invariance(idx, &affine, &psi)?);
    }
    let n0 = options.n0;
    let probes: Vec<_> = [1, 2, 3]
        .iter()
        .map(|&m| FourierSeries::mode(&[n0 * m, m], Complex64::new(1.0, 0.0)))
        .collect();
    let matrix = independence_matrix(&[1, 2, 3], &affine, &probes)?;
    stage.fact("invariance cases", cases);
    stage.fact("rank of T_1, T_2, T_3 on single-mode probes", matrix.rank);
    stage.fact(
        "smallest singular value",
        format!("{:.6}", matrix.singular_values.last().copied().unwrap_or(0.0)),
    );
    stage.residual("max invariance gap", worst_gap);
    if matrix.rank != 3 {
        stage.residual("rank deficit", (3 - matrix.rank) as f64);
    }
    report.stages.push(stage);

    let mut stage = Stage::new("suspension pairing");
    let spec = SuspensionSpec::new(affine, 1.0, 16)?;
    let body = FourierSeries::random_real(3, 3, &mut rng);
    let psi = |t: f64| slice(&body, t);
    let base = suspension_pair_with(&spec, 1, &psi, options.quadrature_tolerance)?;
    stage.fact("<T~_1, psi>", format!("{:.12} {:+.12}i", base.value.re, base.value.im));
    stage.residual("node-doubling difference", base.refine_difference);
    let mut flow_gap: f64 = 0.0;
    for s in [0.37, 1.5, -2.25] {
        let moved = transported(&spec, &psi, s);
        let v = suspension_pair_with(&spec, 1, &moved, options.quadrature_tolerance)?;
        flow_gap = flow_gap.max((v.value - base.value).norm());
    }
    stage.residual("flow invariance gap", flow_gap);
    report.stages.push(stage);

    Ok(finish(report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearizeDemo {
    pub seed: u64,
    pub rho: f64,
    pub n0: i64,
    pub beta: f64,
    pub zeta0: FourierSeries,
    pub zeta: FourierSeries,
    pub recovery_error: f64,
    pub residual: f64,
}

/// Builds a skew product from a seeded `ζ₀` and linearizes it.
pub fn linearize_demo(seed: u64, divisor_floor: f64) -> Result<LinearizeDemo> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let rho = GOLDEN_ROTATION;
    let n0 = rng.random_range(1..=3);
    let zeta0 = centered_random(1, 6, &mut rng);
    let beta: f64 = rng.random();
    let chi = zeta0.translate(&[rho]).minus(&zeta0)?.shifted_by_constant(beta);
    let lin = SkewProductMap::new(rho, n0, chi)?.linearize(divisor_floor)?;
    if (lin.beta - beta).abs() > DEMO_TOLERANCE {
        return Err(Error::domain("recovered beta disagrees with the construction"));
    }
    Ok(LinearizeDemo {
        seed,
        rho,
        n0,
        beta: lin.beta,
        recovery_error: lin.zeta.max_coefficient_distance(&zeta0),
        zeta0,
        zeta: lin.zeta,
        residual: lin.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast(seed: u64) -> DemoOptions {
        DemoOptions {
            certify_radius: 1 << 12,
            ..DemoOptions::new(seed)
        }
    }

    #[test]
    fn default_demo_passes() {
        let report = pipeline_demo(&fast(42)).unwrap();
        assert!(report.passed(), "{}", report.to_markdown());
        assert_eq!(report.stages.len(), 5);
        let md = report.to_markdown();
        assert!(md.contains("## 5. suspension pairing"));
        assert_eq!(md, pipeline_demo(&fast(42)).unwrap().to_markdown());
    }

    #[test]
    fn torus_case_is_noted() {
        let report = pipeline_demo(&DemoOptions { n0: 0, ..fast(1) }).unwrap();
        assert!(report.passed());
        assert!(report.to_markdown().contains("torus case, no nontrivial T_m line"));
    }

    #[test]
    fn liouville_rotation_is_obstructed_at_the_first_stage() {
        let options = DemoOptions {
            rho: 0.110001,
            ..DemoOptions::new(3)
        };
        let report = pipeline_demo(&options).unwrap();
        let ob = report.obstruction.clone().unwrap();
        assert_eq!(ob.stage, "base rotation certificate");
        assert!(!report.passed());
    }

    #[test]
    fn linearize_demo_is_self_consistent() {
        let demo = linearize_demo(42, 1e-10).unwrap();
        assert!(demo.residual <= 1e-9);
        assert!(demo.recovery_error <= 1e-12);
    }
}
