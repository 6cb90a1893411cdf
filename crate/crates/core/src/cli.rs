//! The `tcoh` command-line front end.
//!
//! Every invocation prints its result on stdout (JSON, CSV for plot-ready
//! sequences, markdown for the pipeline demo) and writes
//! `<output-dir>/<group>-<command>.json`, plus a `.csv` twin when plot data is
//! requested. Exit codes: 0 success, 1 error, 2 obstruction or negative
//! verdict, 64 usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cocycle::{random_trials, verify_cocycle_identity, GeneratedCocycle};
use crate::cohomology::{birkhoff_sup_norms, periodic_obstruction, solve, Case};
use crate::config::{RunConfig, SEED_ENV};
use crate::diophantine::{
    check_diophantine_with, continued_fraction, estimate_exponent, FrequencyVector,
};
use crate::error::Error;
use crate::fourier::{FourierSeries, GridFunction};
use crate::lincocycle::{LinearCocycle, TriangularCocycle};
use crate::parabolic::{
    pair, separation_profile, verify_invariance, InvariantDistributionIndex, ParabolicAffineMap,
    SuspensionPoint, SuspensionSpec,
};
use crate::pipeline::{linearize_demo, pipeline_demo, DemoOptions, GOLDEN_ROTATION};
use crate::skewproduct::{verify_constant_conjugacy, CircleMap, SkewProductMap};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_OBSTRUCTED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const DEFAULT_OUTPUT_DIR: &str = "tcoh-out";

/// Violations above this make `cocycle verify` and `skew verify-conj` fail.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "tcoh", version, about = "Cohomological equations over rotations, flows and parabolic maps")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for random sweeps; overrides COHOMO_SEED and the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Also write CSV plot data next to the JSON result.
    #[arg(long, global = true)]
    plot_data: bool,
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand, Debug)]
enum Group {
    /// Diophantine conditions and continued fractions.
    #[command(subcommand)]
    Dio(Dio),
    /// Cohomological equations over rotations and linear flows.
    #[command(subcommand)]
    Cohomo(Cohomo),
    /// Real-valued cocycles over group actions.
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Parabolic affine maps and their invariant distributions.
    #[command(subcommand)]
    Para(Para),
    /// Linear cocycles over circle rotations.
    #[command(subcommand)]
    Lc(Lc),
    /// Skew products and circle maps.
    #[command(subcommand)]
    Skew(Skew),
    /// End-to-end demos.
    #[command(subcommand)]
    Pipeline(Pipeline),
}

#[derive(Subcommand, Debug)]
enum Dio {
    #[command(allow_negative_numbers = true)]
    Check {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long = "C")]
        c: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long = "N")]
        n: u64,
    },
    #[command(allow_negative_numbers = true)]
    Cf {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    #[command(allow_negative_numbers = true)]
    Fit {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long = "N")]
        n: u64,
    },
}

#[derive(Subcommand, Debug)]
enum Cohomo {
    #[command(allow_negative_numbers = true)]
    Solve {
        #[arg(long)]
        case: Case,
        /// FourierSeries JSON, inline or a file path.
        #[arg(long)]
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        divisor_floor: Option<f64>,
    },
    #[command(allow_negative_numbers = true)]
    Birkhoff {
        #[arg(long)]
        xi: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        nmax: u64,
    },
    #[command(allow_negative_numbers = true)]
    Livsic {
        #[arg(long)]
        xi: String,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: u64,
    },
}

#[derive(Subcommand, Debug)]
enum CocycleCmd {
    #[command(allow_negative_numbers = true)]
    Verify {
        /// `{"action": {...}, "generator": series}`
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 50.0)]
        range: f64,
    },
    #[command(allow_negative_numbers = true)]
    Value {
        #[arg(long)]
        spec: String,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long)]
        g: f64,
    },
}

#[derive(Subcommand, Debug)]
enum Para {
    #[command(allow_negative_numbers = true)]
    Pair {
        #[arg(long)]
        m: i64,
        #[arg(long)]
        n0: i64,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        psi: String,
    },
    #[command(allow_negative_numbers = true)]
    InvarianceSweep {
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 12)]
        radius: u64,
    },
    #[command(allow_negative_numbers = true)]
    Separation {
        /// `{"base", "return_time", "quadrature_points", "x", "y"}`
        #[arg(long)]
        spec: String,
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long)]
        dt: f64,
    },
}

#[derive(Subcommand, Debug)]
enum Lc {
    #[command(allow_negative_numbers = true)]
    Lyapunov {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
    },
    #[command(allow_negative_numbers = true)]
    Reduce {
        #[arg(long)]
        spec: String,
    },
    #[command(allow_negative_numbers = true)]
    Probe {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        bound: f64,
        #[arg(long, default_value_t = 1000)]
        n: u64,
        #[arg(long, default_value_t = 64)]
        directions: usize,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
    },
}

#[derive(Subcommand, Debug)]
enum Skew {
    #[command(allow_negative_numbers = true)]
    Linearize {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        n0: i64,
        #[arg(long)]
        chi: String,
    },
    #[command(allow_negative_numbers = true)]
    Rotnum {
        /// Perturbation `p` of the lift `x + p(x)`, as a series on `T¹`.
        #[arg(long)]
        lift: String,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
    },
    #[command(allow_negative_numbers = true)]
    VerifyConj {
        /// `{"sizes": [...], "components": [[...], ...]}`
        #[arg(long = "X")]
        field: String,
        /// Array of displacement series `u` with `f(θ) = θ + u(θ)`.
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
}

#[derive(Subcommand, Debug)]
enum Pipeline {
    #[command(allow_negative_numbers = true)]
    Demo(DemoArgs),
    DemoLinearize,
}

#[derive(Args, Debug)]
struct DemoArgs {
    #[arg(long, default_value_t = 1)]
    n0: i64,
    #[arg(long, default_value_t = GOLDEN_ROTATION)]
    rho: f64,
    #[arg(long, default_value_t = 1 << 20)]
    certify_radius: u64,
}

/// Input errors are reported with exit code 1; library errors keep their
/// obstruction status.
#[derive(Debug)]
enum Failure {
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

enum Stdout {
    Json,
    Csv,
    Text(String),
}

struct Outcome {
    name: &'static str,
    result: Value,
    csv: Option<String>,
    stdout: Stdout,
    negative: bool,
}

impl Outcome {
    fn json(name: &'static str, result: impl Serialize) -> Result<Self, Failure> {
        Ok(Outcome {
            name,
            result: to_value(result)?,
            csv: None,
            stdout: Stdout::Json,
            negative: false,
        })
    }

    fn negative_if(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }
}

struct Context {
    config: RunConfig,
    seed: u64,
}

fn to_value(v: impl Serialize) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Input(format!("cannot serialize result: {e}")))
}

/// Reads `text` as inline JSON when it starts with `{` or `[`, otherwise as
/// a file path.
fn read_json<T: DeserializeOwned>(flag: &str, text: &str) -> Result<T, Failure> {
    let trimmed = text.trim_start();
    let body = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        text.to_string()
    } else {
        std::fs::read_to_string(text)
            .map_err(|e| Failure::Input(format!("--{flag}: cannot read {text}: {e}")))?
    };
    serde_json::from_str(&body).map_err(|e| Failure::Input(format!("--{flag}: invalid JSON: {e}")))
}

fn parse_csv_f64(flag: &str, text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Input(format!("--{flag}: {s:?} is not a number")))
        })
        .collect()
}

fn grid_for(series: &FourierSeries) -> Vec<usize> {
    let r = series.support_radius() as usize;
    let floor = match series.dim() {
        1 => 1024,
        2 => 128,
        _ => 32,
    };
    vec![(2 * r + 2).next_power_of_two().max(floor); series.dim()]
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        s.push_str(&row);
        s.push('\n');
    }
    s
}

fn dio(cmd: Dio, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        Dio::Check { alpha, c, tau, n } => {
            let alpha = FrequencyVector::parse_csv(&alpha)?;
            let threshold = ctx.config.tolerance("resonance_threshold");
            let cert = check_diophantine_with(&alpha, c, tau, n, threshold)?;
            let holds = cert.holds;
            Ok(Outcome::json("dio-check", cert)?.negative_if(!holds))
        }
        Dio::Cf { x, terms } => Outcome::json("dio-cf", continued_fraction(x, terms)?),
        Dio::Fit { alpha, n } => {
            let fit = estimate_exponent(&FrequencyVector::parse_csv(&alpha)?, n)?;
            let plausible = fit.diophantine_plausible;
            Ok(Outcome::json("dio-fit", fit)?.negative_if(!plausible))
        }
    }
}

fn cohomo(cmd: Cohomo, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        Cohomo::Solve {
            case,
            xi,
            alpha,
            divisor_floor,
        } => {
            let xi: FourierSeries = read_json("xi", &xi)?;
            let alpha = FrequencyVector::parse_csv(&alpha)?;
            let floor = divisor_floor.unwrap_or_else(|| ctx.config.tolerance("divisor_floor"));
            let solution = solve(&xi, &alpha, floor, case)?;
            let resonant = !solution.is_complete();
            Ok(Outcome::json("cohomo-solve", solution)?.negative_if(resonant))
        }
        Cohomo::Birkhoff { xi, alpha, nmax } => {
            let xi: FourierSeries = read_json("xi", &xi)?;
            let alpha = FrequencyVector::parse_csv(&alpha)?;
            let report = birkhoff_sup_norms(&xi, &alpha, nmax, &grid_for(&xi))?;
            let csv = csv_table("n,supnorm", report.points.iter().map(|(n, s)| format!("{n},{s}")));
            let bounded = report.bounded;
            Ok(Outcome {
                name: "cohomo-birkhoff",
                result: to_value(&report)?,
                csv: Some(csv),
                stdout: Stdout::Csv,
                negative: !bounded,
            })
        }
        Cohomo::Livsic { xi, p, q } => {
            let xi: FourierSeries = read_json("xi", &xi)?;
            let orbit = periodic_obstruction(&xi, p, q)?;
            let obstructed = orbit.obstructed;
            Ok(Outcome::json("cohomo-livsic", orbit)?.negative_if(obstructed))
        }
    }
}

fn cocycle(cmd: CocycleCmd, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        CocycleCmd::Verify { spec, trials, range } => {
            let c: GeneratedCocycle = read_json("spec", &spec)?;
            c.validate()?;
            let mut rng = SplitMix64::seed_from_u64(ctx.seed);
            let samples = random_trials(&c.action, trials, range, &mut rng);
            let violation = verify_cocycle_identity(&c, &samples)?;
            let ok = violation <= VERIFY_TOLERANCE;
            let result = json!({
                "seed": ctx.seed,
                "trials": trials,
                "max_violation": violation,
                "tolerance": VERIFY_TOLERANCE,
                "holds": ok,
            });
            Ok(Outcome::json("cocycle-verify", result)?.negative_if(!ok))
        }
        CocycleCmd::Value { spec, p, g } => {
            let c: GeneratedCocycle = read_json("spec", &spec)?;
            c.validate()?;
            let p = parse_csv_f64("p", &p)?;
            let value = c.value(&p, g)?;
            Outcome::json("cocycle-value", json!({ "p": p, "g": g, "value": value }))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeparationInput {
    base: ParabolicAffineMap,
    #[serde(default = "unit")]
    return_time: f64,
    #[serde(default = "sixteen")]
    quadrature_points: usize,
    x: SuspensionPoint,
    y: SuspensionPoint,
}

fn unit() -> f64 {
    1.0
}

fn sixteen() -> usize {
    16
}

fn para(cmd: Para, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        Para::Pair {
            m,
            n0,
            rho,
            beta,
            psi,
        } => {
            let psi: FourierSeries = read_json("psi", &psi)?;
            let map = ParabolicAffineMap::new(n0, rho, beta)?;
            let pairing = pair(m, &map, &psi)?;
            Outcome::json("para-pair", json!({ "m": m, "map": map, "pairing": pairing }))
        }
        Para::InvarianceSweep { cases, radius } => {
            let mut rng = SplitMix64::seed_from_u64(ctx.seed);
            let mut rows = Vec::with_capacity(cases);
            let mut worst: f64 = 0.0;
            for case in 0..cases {
                let m = [1, -1, 2, -2, 3, -3][rng.random_range(0..6)];
                let n0: i64 = rng.random_range(1..=3);
                let (rho, beta): (f64, f64) = (rng.random(), rng.random());
                let psi = FourierSeries::random_real(2, radius, &mut rng);
                let map = ParabolicAffineMap::new(n0, rho, beta)?;
                let gap = verify_invariance(InvariantDistributionIndex::new(m, 1)?, &map, &psi)?;
                worst = worst.max(gap);
                rows.push(format!("{case},{m},{n0},{rho},{beta},{gap}"));
            }
            let csv = csv_table("case,m,n0,rho,beta,gap", rows);
            let result = json!({
                "seed": ctx.seed,
                "cases": cases,
                "support_radius": radius,
                "max_gap": worst,
            });
            Ok(Outcome {
                name: "para-invariance-sweep",
                result,
                csv: Some(csv),
                stdout: Stdout::Csv,
                negative: false,
            })
        }
        Para::Separation { spec, horizon, dt } => {
            let input: SeparationInput = read_json("spec", &spec)?;
            let spec = SuspensionSpec::new(input.base, input.return_time, input.quadrature_points)?;
            let profile = separation_profile(&spec, input.x, input.y, horizon, dt)?;
            let csv = csv_table("t,distance", profile.samples.iter().map(|(t, d)| format!("{t},{d}")));
            let result = json!({ "max": profile.max, "slope": profile.slope(), "samples": profile.samples.len() });
            Ok(Outcome {
                name: "para-separation",
                result,
                csv: Some(csv),
                stdout: Stdout::Csv,
                negative: false,
            })
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CocycleInput {
    Triangular(TriangularCocycle),
    Linear(LinearCocycle),
}

impl CocycleInput {
    fn linear(self) -> Result<LinearCocycle, Failure> {
        let c = match self {
            CocycleInput::Triangular(t) => TriangularCocycle::new(t.a, t.base_rho)?.to_linear(),
            CocycleInput::Linear(l) => l,
        };
        c.validate()?;
        Ok(c)
    }
}

fn read_cocycle(text: &str) -> Result<CocycleInput, Failure> {
    read_json("spec", text).map_err(|e| match e {
        Failure::Input(msg) if msg.contains("did not match any variant") => Failure::Input(
            "--spec: expected {\"a\", \"base_rho\"} or {\"base_rho\", \"generator\"}".to_string(),
        ),
        other => other,
    })
}

fn lc(cmd: Lc, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        Lc::Lyapunov { spec, n, x0 } => {
            let c = read_cocycle(&spec)?.linear()?;
            let lambda = c.lyapunov_exponent(x0, n)?;
            Outcome::json("lc-lyapunov", json!({ "n": n, "x0": x0, "lyapunov": lambda }))
        }
        Lc::Reduce { spec } => {
            let t = match read_cocycle(&spec)? {
                CocycleInput::Triangular(t) => TriangularCocycle::new(t.a, t.base_rho)?,
                CocycleInput::Linear(_) => {
                    return Err(Failure::Input(
                        "--spec: reduction needs a triangular cocycle {\"a\", \"base_rho\"}".to_string(),
                    ))
                }
            };
            let normal = t.reduce_to_normal_form(ctx.config.tolerance("divisor_floor"))?;
            Outcome::json("lc-reduce", normal)
        }
        Lc::Probe {
            spec,
            bound,
            n,
            directions,
            x0,
        } => {
            let c = read_cocycle(&spec)?.linear()?;
            Outcome::json("lc-probe", c.quasi_anosov_probe(x0, directions, n, bound)?)
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldInput {
    sizes: Vec<usize>,
    components: Vec<Vec<f64>>,
}

fn skew(cmd: Skew, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        Skew::Linearize { rho, n0, chi } => {
            let chi: FourierSeries = read_json("chi", &chi)?;
            let map = SkewProductMap::new(rho, n0, chi)?;
            let lin = map.linearize(ctx.config.tolerance("divisor_floor"))?;
            Outcome::json("skew-linearize", lin)
        }
        Skew::Rotnum { lift, n } => {
            let p: FourierSeries = read_json("lift", &lift)?;
            Outcome::json("skew-rotnum", CircleMap::new(p)?.rotation_number(n)?)
        }
        Skew::VerifyConj { field, f, alpha } => {
            let input: FieldInput = read_json("X", &field)?;
            let grids = input
                .components
                .into_iter()
                .map(|c| GridFunction::new(input.sizes.clone(), c))
                .collect::<Result<Vec<_>, _>>()?;
            let displacements: Vec<FourierSeries> = read_json("f", &f)?;
            let alpha = FrequencyVector::parse_csv(&alpha)?;
            let residual = verify_constant_conjugacy(&grids, &displacements, &alpha)?;
            let ok = residual <= VERIFY_TOLERANCE;
            let result = json!({ "residual": residual, "tolerance": VERIFY_TOLERANCE, "conjugate": ok });
            Ok(Outcome::json("skew-verify-conj", result)?.negative_if(!ok))
        }
    }
}

fn pipeline(cmd: Pipeline, ctx: &Context) -> Result<Outcome, Failure> {
    match cmd {
        Pipeline::Demo(args) => {
            let options = DemoOptions {
                n0: args.n0,
                rho: args.rho,
                certify_radius: args.certify_radius,
                divisor_floor: ctx.config.tolerance("divisor_floor"),
                quadrature_tolerance: ctx.config.tolerance("quadrature"),
                ..DemoOptions::new(ctx.seed)
            };
            let report = pipeline_demo(&options)?;
            if report.obstruction.is_none() && !report.passed() {
                return Err(Failure::Input(format!(
                    "pipeline residual {:.3e} above tolerance\n{}",
                    report.max_residual,
                    report.to_markdown()
                )));
            }
            let markdown = report.to_markdown();
            let negative = report.obstruction.is_some();
            Ok(Outcome {
                name: "pipeline-demo",
                result: to_value(&report)?,
                csv: None,
                stdout: Stdout::Text(markdown),
                negative,
            })
        }
        Pipeline::DemoLinearize => {
            let demo = linearize_demo(ctx.seed, ctx.config.tolerance("divisor_floor"))?;
            Outcome::json("pipeline-demo-linearize", demo)
        }
    }
}

fn dispatch(group: Group, ctx: &Context) -> Result<Outcome, Failure> {
    match group {
        Group::Dio(c) => dio(c, ctx),
        Group::Cohomo(c) => cohomo(c, ctx),
        Group::Cocycle(c) => cocycle(c, ctx),
        Group::Para(c) => para(c, ctx),
        Group::Lc(c) => lc(c, ctx),
        Group::Skew(c) => skew(c, ctx),
        Group::Pipeline(c) => pipeline(c, ctx),
    }
}

fn command_name(group: &Group) -> &'static str {
    match group {
        Group::Dio(Dio::Check { .. }) => "dio-check",
        Group::Dio(Dio::Cf { .. }) => "dio-cf",
        Group::Dio(Dio::Fit { .. }) => "dio-fit",
        Group::Cohomo(Cohomo::Solve { .. }) => "cohomo-solve",
        Group::Cohomo(Cohomo::Birkhoff { .. }) => "cohomo-birkhoff",
        Group::Cohomo(Cohomo::Livsic { .. }) => "cohomo-livsic",
        Group::Cocycle(CocycleCmd::Verify { .. }) => "cocycle-verify",
        Group::Cocycle(CocycleCmd::Value { .. }) => "cocycle-value",
        Group::Para(Para::Pair { .. }) => "para-pair",
        Group::Para(Para::InvarianceSweep { .. }) => "para-invariance-sweep",
        Group::Para(Para::Separation { .. }) => "para-separation",
        Group::Lc(Lc::Lyapunov { .. }) => "lc-lyapunov",
        Group::Lc(Lc::Reduce { .. }) => "lc-reduce",
        Group::Lc(Lc::Probe { .. }) => "lc-probe",
        Group::Skew(Skew::Linearize { .. }) => "skew-linearize",
        Group::Skew(Skew::Rotnum { .. }) => "skew-rotnum",
        Group::Skew(Skew::VerifyConj { .. }) => "skew-verify-conj",
        Group::Pipeline(Pipeline::Demo(_)) => "pipeline-demo",
        Group::Pipeline(Pipeline::DemoLinearize) => "pipeline-demo-linearize",
    }
}

fn obstruction_value(e: &Error) -> Value {
    let resonant = match e {
        Error::Resonance { witness, .. } => vec![witness.clone()],
        Error::Obstructed { resonant } => resonant.clone(),
        _ => Vec::new(),
    };
    json!({ "status": "obstructed", "error": e.to_string(), "resonant_set": resonant })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn write_artifacts(dir: &Path, name: &str, json: &str, csv: Option<&str>) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{name}.json")), json)?;
    if let Some(csv) = csv {
        std::fs::write(dir.join(format!("{name}.csv")), csv)?;
    }
    Ok(())
}

/// Runs `tcoh` with the seed override taken from the environment.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    run_with_env(args, env_seed.as_deref(), out, err)
}

pub fn run_with_env<I, T>(args: I, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let fail = |err: &mut dyn Write, msg: String| {
        let _ = writeln!(err, "error: {msg}");
        EXIT_ERROR
    };
    let config = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(err, e.to_string()),
        },
        None => RunConfig::default(),
    };
    let seed = match config.resolve_seed(cli.seed, env_seed) {
        Ok(s) => s,
        Err(e) => return fail(err, e.to_string()),
    };
    let dir = cli
        .output_dir
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
    let plot = cli.plot_data || config.emit_plot_data;
    let name = command_name(&cli.group);
    let ctx = Context { config, seed };

    let (code, stdout, json, csv) = match dispatch(cli.group, &ctx) {
        Ok(outcome) => {
            debug_assert_eq!(outcome.name, name);
            let json = pretty(&outcome.result);
            let stdout = match outcome.stdout {
                Stdout::Json => json.clone(),
                Stdout::Csv => outcome.csv.clone().unwrap_or_default(),
                Stdout::Text(t) => t,
            };
            let code = if outcome.negative { EXIT_OBSTRUCTED } else { EXIT_OK };
            (code, stdout, json, outcome.csv.filter(|_| plot))
        }
        Err(Failure::Core(e)) if e.is_obstruction() => {
            let json = pretty(&obstruction_value(&e));
            let _ = writeln!(err, "obstructed: {e}");
            (EXIT_OBSTRUCTED, json.clone(), json, None)
        }
        Err(Failure::Core(e)) => return fail(err, e.to_string()),
        Err(Failure::Input(msg)) => return fail(err, msg),
    };
    let _ = out.write_all(stdout.as_bytes());
    if let Err(e) = write_artifacts(&dir, name, &json, csv.as_deref()) {
        return fail(err, format!("cannot write results to {}: {e}", dir.display()));
    }
    let _ = writeln!(err, "wrote {}", dir.join(format!("{name}.json")).display());
    code
}
