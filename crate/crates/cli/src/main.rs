//! Command-line surface for the `eigloc` library: scalar spectral bounds,
//! localization regions with SVG plots, sampled enclosure checks, stability
//! certificates, state-feedback gain synthesis, RK4 simulation with decay
//! envelopes, and a bound-vs-eigensolver wall-time benchmark.
//!
//! Exit codes are script-friendly and uniform across subcommands:
//! `0` success, `1` infeasible / uncertified / violations found,
//! `2` input error, `3` numerical failure. All randomness flows from the
//! `--seed` flag of the subcommand that uses it, so every run is
//! deterministic given its inputs (wall-time fields excepted).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eigloc::{
    build_families, build_interval_families, certify, check_envelope, decay_envelope,
    eigenvalues_fast, enclosure_check, gershgorin_bounds, integrate, interval_bounds,
    optimize_scaling_with, ostrowski_bounds, render_svg, sample_interval, synthesize_with,
    verify_synthesis, BoundTarget, BoundVariant, BoundsReport, CanvasSpec, CertifyStrategy,
    IntervalMatrix, MatrixError, OptimizeObjective, OptimizerBudget, OracleError, RealMatrix,
    Region, RegionError, RegionMode, Rng, SampleLaw, Scaling, Signal, SimError, SynthesisError,
    SynthesisOptions, SynthesisProblem, Verdict,
};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "eigloc",
    version,
    about = "Guaranteed eigenvalue localization, stability certificates, and gain synthesis \
             for constant and interval-uncertain matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar spectral bounds (plain, scaled, blended) for a matrix.
    Bounds(BoundsArgs),
    /// Localization region: extents, oscillation estimate, SVG plot.
    Region(RegionArgs),
    /// Sampled enclosure check of an interval model against its region.
    Check(CheckArgs),
    /// Stability certificate (direct or symmetrized route) with envelope.
    Certify(CertifyArgs),
    /// Network-synchronization closed loop: build and optionally certify.
    Network(NetworkArgs),
    /// State-feedback gain synthesis from a problem JSON.
    Synthesize(SynthesizeArgs),
    /// RK4 simulation under disturbance, with envelope verdict.
    Simulate(SimulateArgs),
    /// Wall-time benchmark of bound checks vs the dense eigensolver.
    Bench(BenchArgs),
}

// ---------------------------------------------------------------------------
// Failure handling: every error carries the exit code it maps to.

struct Failure {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, Failure>;

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::input(format!("json: {e}"))
    }
}

impl From<MatrixError> for Failure {
    fn from(e: MatrixError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<RegionError> for Failure {
    fn from(e: RegionError) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        Failure::numeric(e.to_string())
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::BadStep => Failure::input(e.to_string()),
            SimError::NonFinite { .. } => Failure::numeric(e.to_string()),
        }
    }
}

impl From<SynthesisError> for Failure {
    fn from(e: SynthesisError) -> Self {
        let code = match e {
            SynthesisError::Infeasible { .. } => 1,
            SynthesisError::Stalled { .. }
            | SynthesisError::SingularQ
            | SynthesisError::GainResidual { .. }
            | SynthesisError::Oracle(_) => 3,
            SynthesisError::BadProblem(_)
            | SynthesisError::VertexExplosion { .. }
            | SynthesisError::Matrix(_) => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult<u8> {
    match command {
        Command::Bounds(a) => cmd_bounds(a),
        Command::Region(a) => cmd_region(a),
        Command::Check(a) => cmd_check(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Network(a) => cmd_network(a),
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

// ---------------------------------------------------------------------------
// Shared input/output plumbing.

/// A matrix input file: constant `{"n", "entries"}` or interval when the
/// uncertainty fields (`diag_lo`, `diag_hi`, `offdiag_mag`) are present.
enum MatrixInput {
    Constant(RealMatrix),
    Interval(IntervalMatrix),
}

impl MatrixInput {
    fn n(&self) -> usize {
        match self {
            MatrixInput::Constant(q) => q.n(),
            MatrixInput::Interval(m) => m.n(),
        }
    }

    fn target(&self) -> BoundTarget<'_> {
        match self {
            MatrixInput::Constant(q) => BoundTarget::Constant(q),
            MatrixInput::Interval(m) => BoundTarget::Interval(m),
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn load_matrix_input(path: &Path) -> CliResult<MatrixInput> {
    let value: Value = serde_json::from_str(&read_text(path)?)?;
    let interval = value.get("diag_lo").is_some()
        || value.get("diag_hi").is_some()
        || value.get("offdiag_mag").is_some();
    if interval {
        Ok(MatrixInput::Interval(serde_json::from_value(value)?))
    } else {
        Ok(MatrixInput::Constant(serde_json::from_value(value)?))
    }
}

fn load_interval(path: &Path) -> CliResult<IntervalMatrix> {
    match load_matrix_input(path)? {
        MatrixInput::Interval(m) => Ok(m),
        MatrixInput::Constant(q) => Ok(IntervalMatrix::degenerate(q)),
    }
}

/// Writes pretty JSON to `output`, or to stdout when no path is given.
fn emit_json(output: &Option<PathBuf>, value: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Builds a scaling of the right dimension from CLI weights/exponent.
fn scaling_for(n: usize, d: Option<&[f64]>, alpha: f64) -> CliResult<Scaling> {
    let weights = match d {
        Some(list) => {
            if list.len() != n {
                return Err(Failure::input(format!(
                    "--scaling has {} weights but the matrix is {n}x{n}",
                    list.len()
                )));
            }
            list.to_vec()
        }
        None => vec![1.0; n],
    };
    Ok(Scaling::new(weights, alpha)?)
}

fn parse_weights(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("bad weight {tok:?} in --scaling")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    /// Push the upper bound down.
    Max,
    /// Push the lower bound up.
    Min,
    /// Minimize the width of the bound interval.
    Width,
}

impl From<ObjectiveArg> for OptimizeObjective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Max => OptimizeObjective::MaxBound,
            ObjectiveArg::Min => OptimizeObjective::MinBound,
            ObjectiveArg::Width => OptimizeObjective::Both,
        }
    }
}

#[derive(Args)]
struct BoundsArgs {
    /// Matrix JSON (constant, or interval when uncertainty fields exist).
    #[arg(long)]
    input: PathBuf,
    /// Search for the best scaling/exponent instead of evaluating fixed ones.
    #[arg(long, value_enum)]
    optimize: Option<ObjectiveArg>,
    /// Comma-separated diagonal weights for the scaled variants.
    #[arg(long)]
    scaling: Option<String>,
    /// Blend exponent in [0, 1] for the alpha variants.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Coordinate-descent pass budget for the optimizer.
    #[arg(long, default_value_t = 40)]
    passes: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn eval_bounds(input: &MatrixInput, variant: BoundVariant, sc: &Scaling) -> BoundsReport {
    match (input, variant) {
        (MatrixInput::Constant(q), BoundVariant::Plain) => gershgorin_bounds(q, None),
        (MatrixInput::Constant(q), BoundVariant::Scaled) => gershgorin_bounds(q, Some(sc)),
        (MatrixInput::Constant(q), _) => ostrowski_bounds(q, sc),
        (MatrixInput::Interval(m), BoundVariant::Plain) => interval_bounds(m, None, false),
        (MatrixInput::Interval(m), BoundVariant::Scaled) => interval_bounds(m, Some(sc), false),
        (MatrixInput::Interval(m), _) => interval_bounds(m, Some(sc), true),
    }
}

fn cmd_bounds(a: BoundsArgs) -> CliResult<u8> {
    let input = load_matrix_input(&a.input)?;
    let n = input.n();
    let weights = a.scaling.as_deref().map(parse_weights).transpose()?;
    let budget = OptimizerBudget { passes: a.passes, tol: 1e-9 };

    let mut report = json!({
        "input": match &input { MatrixInput::Constant(_) => "constant", MatrixInput::Interval(_) => "interval" },
        "n": n,
        "optimized": a.optimize.map(|o| match o { ObjectiveArg::Max => "max", ObjectiveArg::Min => "min", ObjectiveArg::Width => "width" }),
    });

    let variants = [
        ("plain", BoundVariant::Plain),
        ("scaled", BoundVariant::Scaled),
        ("alpha", BoundVariant::Alpha),
        ("scaled_alpha", BoundVariant::ScaledAlpha),
    ];
    for (name, variant) in variants {
        let rep = match (a.optimize, variant) {
            (_, BoundVariant::Plain) => eval_bounds(&input, BoundVariant::Plain, &Scaling::uniform(n)),
            (Some(objective), _) => {
                optimize_scaling_with(input.target(), variant, objective.into(), &budget).1
            }
            (None, _) => {
                // Fixed evaluation: the provided weights (uniform when
                // absent) and exponent.
                let d = match variant {
                    BoundVariant::Alpha => None,
                    _ => weights.as_deref(),
                };
                let alpha = match variant {
                    BoundVariant::Scaled => 0.5, // unused by the row/col radii
                    _ => a.alpha,
                };
                eval_bounds(&input, variant, &scaling_for(n, d, alpha)?)
            }
        };
        report[name] = serde_json::to_value(&rep)?;
    }

    emit_json(&a.output, &report)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// region / check (shared family assembly)

#[derive(Clone, Copy, ValueEnum, PartialEq)]
#[value(rename_all = "snake_case")]
enum ModeArg {
    /// Row and column disc families.
    RowsCols,
    /// Blended (row^alpha * col^(1-alpha)) disc family.
    Ostrowski,
    /// Both of the above.
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<RegionMode> {
        match self {
            ModeArg::RowsCols => vec![RegionMode::RowsCols],
            ModeArg::Ostrowski => vec![RegionMode::Ostrowski],
            ModeArg::Both => vec![RegionMode::RowsCols, RegionMode::Ostrowski],
        }
    }
}

#[derive(Args)]
struct RegionShapeArgs {
    /// Which disc families form the base region.
    #[arg(long, value_enum, default_value_t = ModeArg::RowsCols)]
    mode: ModeArg,
    /// Extra family per occurrence: comma-separated weights (pairs with
    /// --alpha by position; exponent defaults to 0.5).
    #[arg(long = "scaling")]
    scalings: Vec<String>,
    /// Blend exponents paired with --scaling occurrences; surplus values
    /// add uniform-weight blended families on their own.
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Also add the width-optimized blended family.
    #[arg(long)]
    optimize: bool,
    /// Optimizer pass budget (with --optimize).
    #[arg(long, default_value_t = 40)]
    passes: usize,
}

fn families_for(
    input: &MatrixInput,
    scaling: Option<&Scaling>,
    mode: RegionMode,
) -> Vec<eigloc::DiscFamily> {
    match input {
        MatrixInput::Constant(q) => build_families(q, scaling, mode),
        MatrixInput::Interval(m) => build_interval_families(m, scaling, mode),
    }
}

/// Region from the mode plus any number of scaled/blended families; also
/// returns the optimized scaling when one was requested.
fn assemble_region(input: &MatrixInput, shape: &RegionShapeArgs) -> CliResult<(Region, Option<Scaling>)> {
    let n = input.n();
    let mut region = Region::new(Vec::new());
    for mode in shape.mode.modes() {
        for fam in families_for(input, None, mode) {
            region.push(fam);
        }
    }
    for (i, text) in shape.scalings.iter().enumerate() {
        let weights = parse_weights(text)?;
        let alpha = shape.alphas.get(i).copied().unwrap_or(0.5);
        let sc = scaling_for(n, Some(&weights), alpha)?;
        for mode in shape.mode.modes() {
            for fam in families_for(input, Some(&sc), mode) {
                region.push(fam);
            }
        }
    }
    // Surplus --alpha occurrences: uniform-weight blended families.
    for alpha in shape.alphas.iter().skip(shape.scalings.len()) {
        let sc = scaling_for(n, None, *alpha)?;
        for fam in families_for(input, Some(&sc), RegionMode::Ostrowski) {
            region.push(fam);
        }
    }
    let mut optimized = None;
    if shape.optimize {
        let budget = OptimizerBudget { passes: shape.passes, tol: 1e-9 };
        let (sc, _) = optimize_scaling_with(
            input.target(),
            BoundVariant::ScaledAlpha,
            OptimizeObjective::Both,
            &budget,
        );
        for fam in families_for(input, Some(&sc), RegionMode::Ostrowski) {
            region.push(fam);
        }
        optimized = Some(sc);
    }
    Ok((region, optimized))
}

#[derive(Args)]
struct RegionArgs {
    /// Matrix JSON (constant or interval).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    shape: RegionShapeArgs,
    /// Boundary-scan granularity for extents.
    #[arg(long, default_value_t = 1e-3)]
    resolution: f64,
    /// Overlay markers: CSV file with one "re,im" pair per line.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Write an SVG rendering of the region here.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn load_points(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (lineno, line) in read_text(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let bad = || Failure::input(format!("{}:{}: expected \"re,im\"", path.display(), lineno + 1));
        let re = parts.next().ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?;
        let im = parts.next().ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?;
        out.push((re, im));
    }
    Ok(out)
}

fn cmd_region(a: RegionArgs) -> CliResult<u8> {
    let input = load_matrix_input(&a.input)?;
    let (region, optimized) = assemble_region(&input, &a.shape)?;

    let extent = region.real_extent(a.resolution);
    let imag = region.imag_bound(a.resolution);
    let oscillation = region.oscillation_estimate(a.resolution);

    let points = a.points.as_deref().map(load_points).transpose()?.unwrap_or_default();
    let svg_path = match &a.svg {
        Some(path) => {
            let doc = render_svg(&region, &points, &CanvasSpec::default())?;
            fs::write(path, doc)
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
            Some(path.display().to_string())
        }
        None => None,
    };

    let report = json!({
        "families": region.families.iter().map(|f| json!({
            "label": f.label,
            "discs": f.members.len(),
        })).collect::<Vec<_>>(),
        "real_extent": extent.map(|(lo, hi)| vec![lo, hi]),
        "imag_bound": imag,
        "oscillation": oscillation.map(|(mu, overshoot)| json!({
            "mu": mu,
            "overshoot": overshoot,
        })),
        "optimized_scaling": optimized,
        "svg": svg_path,
    });
    emit_json(&a.output, &report)?;
    Ok(0)
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    Uniform,
    Vertex,
    Both,
}

#[derive(Args)]
struct CheckArgs {
    /// Interval matrix JSON.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    shape: RegionShapeArgs,
    /// Realizations per sampling law.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = LawArg::Both)]
    law: LawArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Run the sampling laws on separate threads.
    #[arg(long)]
    parallel: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn cmd_check(a: CheckArgs) -> CliResult<u8> {
    let model = match load_matrix_input(&a.input)? {
        MatrixInput::Interval(m) => m,
        MatrixInput::Constant(_) => {
            return Err(Failure::input(
                "check needs an interval model (diag_lo/diag_hi/offdiag_mag fields)",
            ))
        }
    };
    let input = MatrixInput::Interval(model.clone());
    let (region, _) = assemble_region(&input, &a.shape)?;

    let laws: Vec<(&str, SampleLaw)> = match a.law {
        LawArg::Uniform => vec![("uniform", SampleLaw::Uniform)],
        LawArg::Vertex => vec![("vertex", SampleLaw::Vertex)],
        LawArg::Both => vec![("uniform", SampleLaw::Uniform), ("vertex", SampleLaw::Vertex)],
    };

    let mut results: Vec<(&str, eigloc::EnclosureReport)> = Vec::new();
    if a.parallel && laws.len() > 1 {
        let chunks = std::thread::scope(|scope| {
            let handles: Vec<_> = laws
                .iter()
                .map(|(name, law)| {
                    let (model, region) = (&model, &region);
                    let (samples, seed, law) = (a.samples, a.seed, *law);
                    scope.spawn(move || (*name, enclosure_check(model, region, seed, samples, law)))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("checker thread")).collect::<Vec<_>>()
        });
        for (name, rep) in chunks {
            results.push((name, rep?));
        }
    } else {
        for (name, law) in laws {
            results.push((name, enclosure_check(&model, &region, a.seed, a.samples, law)?));
        }
    }

    let enclosed = results.iter().all(|(_, r)| r.enclosed());
    let mut report = json!({ "enclosed": enclosed, "seed": a.seed });
    for (name, rep) in &results {
        report[name] = serde_json::to_value(rep)?;
    }
    emit_json(&a.output, &report)?;
    Ok(if enclosed { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// certify / network

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Disc bounds on the model itself (valid as a worst-case logarithmic
    /// norm; no blended radii).
    Direct,
    /// Disc bounds on the symmetrized model (all variants allowed).
    Demidovich,
}

impl From<StrategyArg> for CertifyStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Direct => CertifyStrategy::Direct,
            StrategyArg::Demidovich => CertifyStrategy::Demidovich,
        }
    }
}

#[derive(Args)]
struct CertifyArgs {
    /// Interval matrix JSON (a constant matrix certifies as a degenerate
    /// interval model).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyArg::Demidovich)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 40)]
    passes: usize,
    /// Disturbance input-gain bound sup ‖F(t)‖ for the envelope.
    #[arg(long, default_value_t = 0.0)]
    gain_bound: f64,
    /// Scalar disturbance bound sup |f(t)| for the envelope.
    #[arg(long, default_value_t = 0.0)]
    disturbance_bound: f64,
    /// Initial-state norm the envelope starts from.
    #[arg(long, default_value_t = 1.0)]
    x0_norm: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn cmd_certify(a: CertifyArgs) -> CliResult<u8> {
    let model = load_interval(&a.input)?;
    let budget = OptimizerBudget { passes: a.passes, tol: 1e-9 };
    let cert = certify(&model, a.strategy.into(), &budget);
    let stable = cert.verdict == Verdict::Stable;

    let envelope = if stable {
        Some(
            decay_envelope(cert.sigma, a.gain_bound, a.disturbance_bound, a.x0_norm)
                .map_err(|e| Failure::input(e.to_string()))?,
        )
    } else {
        None
    };

    let report = json!({ "certificate": cert, "envelope": envelope });
    emit_json(&a.output, &report)?;
    Ok(if stable { 0 } else { 1 })
}

#[derive(Args)]
struct NetworkArgs {
    /// Number of agents.
    #[arg(long)]
    n: usize,
    /// Coupling gain q of the decentralized law u_i = -q·x_i.
    #[arg(long)]
    q: f64,
    /// Uniform interaction magnitude bound for every entry.
    #[arg(long, default_value_t = 0.0)]
    coupling: f64,
    /// n-by-n magnitude matrix JSON (overrides --coupling).
    #[arg(long)]
    coupling_matrix: Option<PathBuf>,
    /// Also certify the closed loop and fail when inconclusive.
    #[arg(long)]
    certify: bool,
    #[arg(long, default_value_t = 40)]
    passes: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn cmd_network(a: NetworkArgs) -> CliResult<u8> {
    let m = match &a.coupling_matrix {
        Some(path) => {
            let m: RealMatrix = serde_json::from_str(&read_text(path)?)?;
            if m.n() != a.n {
                return Err(Failure::input(format!(
                    "coupling matrix is {}x{} but --n is {}",
                    m.n(),
                    m.n(),
                    a.n
                )));
            }
            m
        }
        None => {
            let mut m = RealMatrix::zeros(a.n);
            for i in 0..a.n {
                for j in 0..a.n {
                    m.set(i, j, a.coupling);
                }
            }
            m
        }
    };
    let model = eigloc::network_closed_loop(a.n, a.q, &m)
        .map_err(|e| Failure::input(e.to_string()))?;

    let mut stable = true;
    let mut report = json!({ "model": model });
    if a.certify {
        let budget = OptimizerBudget { passes: a.passes, tol: 1e-9 };
        let cert = certify(&model, CertifyStrategy::Direct, &budget);
        stable = cert.verdict == Verdict::Stable;
        report["certificate"] = serde_json::to_value(&cert)?;
    }
    emit_json(&a.output, &report)?;
    Ok(if stable { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// synthesize

#[derive(Args)]
struct SynthesizeArgs {
    /// Problem JSON: A0, deltaA_mag, B0, b_range, F_bar, alpha_rate, epsilon.
    #[arg(long)]
    input: PathBuf,
    /// Sampled closed-loop verification draws.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Greedy trace(Q) reduction after feasibility.
    #[arg(long)]
    minimize_trace: bool,
    /// Force the conservative per-entry robustness encoding.
    #[arg(long)]
    per_entry: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn cmd_synthesize(a: SynthesizeArgs) -> CliResult<u8> {
    let problem: SynthesisProblem = serde_json::from_str(&read_text(&a.input)?)?;
    let options =
        SynthesisOptions { minimize_trace: a.minimize_trace, force_per_entry: a.per_entry };
    let result = synthesize_with(&problem, options)?;
    let verification = verify_synthesis(&problem, &result, a.seed, a.samples)?;
    if !verification.certificate_ok {
        return Err(Failure::numeric(format!(
            "solver returned a certificate that fails its own recheck: {:?}",
            verification.broken
        )));
    }

    // Human-readable summary; the JSON goes to --output or stdout.
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "feasible: beta = {:.6}, min slack = {:.3e}, mode = {:?}",
        result.beta,
        result.min_slack(),
        result.mode
    );
    for row in &result.k {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        let _ = writeln!(summary, "K row: [{}]", cells.join(", "));
    }
    let _ = writeln!(
        summary,
        "verification: {} samples, {} unstable, worst closed-loop Re = {:.6}",
        verification.samples, verification.unstable_samples, verification.max_closed_loop_re
    );
    if a.output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }

    let report = json!({ "result": result, "verification": verification });
    emit_json(&a.output, &report)?;
    Ok(if verification.unstable_samples == 0 { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// simulate

/// System description consumed by `simulate`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimSpec {
    /// Constant or interval matrix.
    a: Value,
    /// Disturbance input column (defaults to zero).
    #[serde(default)]
    f_column: Option<Vec<f64>>,
    /// Scalar disturbance signal (defaults to zero).
    #[serde(default)]
    signal: Option<Signal>,
    x0: Vec<f64>,
    #[serde(default)]
    t_end: Option<f64>,
    #[serde(default)]
    step: Option<f64>,
    /// Interval models switch realizations with this period.
    #[serde(default)]
    switch_period: Option<f64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// System JSON: {"a", "x0", "f_column"?, "signal"?, "t_end"?, "step"?,
    /// "switch_period"?}.
    #[arg(long)]
    input: PathBuf,
    /// Override the horizon from the system file.
    #[arg(long)]
    t_end: Option<f64>,
    /// Override the mesh step from the system file.
    #[arg(long)]
    step: Option<f64>,
    /// Seed for the switching realizations of an interval model.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Write the trajectory CSV (t, x_1..x_n, |x|, u_1) here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<u8> {
    let spec: SimSpec = serde_json::from_str(&read_text(&a.input)?)?;
    let interval = spec.a.get("diag_lo").is_some() || spec.a.get("offdiag_mag").is_some();
    let model: IntervalMatrix = if interval {
        serde_json::from_value(spec.a.clone())?
    } else {
        IntervalMatrix::degenerate(serde_json::from_value(spec.a.clone())?)
    };
    let n = model.n();
    if spec.x0.len() != n {
        return Err(Failure::input(format!("x0 has {} entries for an {n}x{n} system", spec.x0.len())));
    }
    let f_column = spec.f_column.unwrap_or_else(|| vec![0.0; n]);
    if f_column.len() != n {
        return Err(Failure::input(format!(
            "f_column has {} entries for an {n}x{n} system",
            f_column.len()
        )));
    }
    let signal = spec.signal.unwrap_or(Signal::Constant { value: 0.0 });
    let t_end = a.t_end.or(spec.t_end).unwrap_or(12.0);
    let step = a.step.or(spec.step).unwrap_or(1e-3);
    let switch_period = spec.switch_period.unwrap_or(0.25);
    if !switch_period.is_finite() || switch_period <= 0.0 {
        return Err(Failure::input("switch_period must be positive"));
    }

    // Realizations: the matrix itself for a constant system, seeded vertex
    // draws switched every `switch_period` for an interval model.
    let switches: Vec<RealMatrix> = if model.is_degenerate() {
        vec![model.nominal().clone()]
    } else {
        sample_interval(&model, a.seed, 8, SampleLaw::Vertex)
    };

    // Certificate and envelope: sigma covers every realization, so the
    // envelope claim applies to the switched trajectory.
    let budget = OptimizerBudget::default();
    let cert = certify(&model, CertifyStrategy::Demidovich, &budget);
    let gain_bound = f_column.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x0_norm = spec.x0.iter().map(|v| v * v).sum::<f64>().sqrt();
    let envelope = if cert.verdict == Verdict::Stable {
        Some(
            decay_envelope(cert.sigma, gain_bound, signal.amplitude_bound(), x0_norm)
                .map_err(|e| Failure::numeric(e.to_string()))?,
        )
    } else {
        None
    };

    let mut traj = integrate(
        |t, x, dx| {
            let k = ((t / switch_period) as usize) % switches.len();
            switches[k].mul_vec(x, dx);
            let f = signal.eval(t);
            for (di, fi) in dx.iter_mut().zip(&f_column) {
                *di += fi * f;
            }
        },
        &spec.x0,
        t_end,
        step,
    )?;
    traj.controls = Some(traj.times.iter().map(|t| vec![signal.eval(*t)]).collect());

    if let Some(path) = &a.csv {
        fs::write(path, traj.to_csv())
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }

    let envelope_check = envelope.as_ref().map(|env| check_envelope(&traj, env, 1e-6));
    let norms = traj.norms();
    let peak = norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let report = json!({
        "certificate": cert,
        "envelope": envelope,
        "envelope_check": envelope_check,
        "steps": traj.times.len() - 1,
        "peak_norm": peak,
        "final_norm": norms.last(),
        "csv": a.csv.as_ref().map(|p| p.display().to_string()),
    });
    emit_json(&a.output, &report)?;

    // Violating a certified envelope is a hard failure for scripts; an
    // uncertified model still simulates fine and exits 0.
    Ok(match envelope_check {
        Some(rep) if !rep.ok => 1,
        _ => 0,
    })
}

// ---------------------------------------------------------------------------
// bench

#[derive(Clone, Copy, ValueEnum, PartialEq)]
#[value(rename_all = "snake_case")]
enum MethodArg {
    /// Plain disc bounds on the nominal matrix.
    Gershgorin,
    /// Worst-case disc bounds on the interval model.
    IntervalGershgorin,
    /// Dense Hessenberg + shifted-QR eigensolver on the nominal matrix.
    OracleEig,
}

impl MethodArg {
    fn tag(self) -> &'static str {
        match self {
            MethodArg::Gershgorin => "gershgorin",
            MethodArg::IntervalGershgorin => "interval_gershgorin",
            MethodArg::OracleEig => "oracle_eig",
        }
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated matrix sizes.
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
    n: Vec<usize>,
    /// Comma-separated methods to time.
    #[arg(
        long = "method",
        alias = "methods",
        value_delimiter = ',',
        default_value = "gershgorin,interval_gershgorin,oracle_eig"
    )]
    methods: Vec<MethodArg>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Repetitions per measurement; the minimum is reported.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn bench_model(seed: u64, n: usize) -> IntervalMatrix {
    let mut rng = Rng::new(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let data: Vec<f64> = (0..n * n).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let nominal = RealMatrix::from_flat(n, data).expect("square by construction");
    let lo: Vec<f64> = (0..n).map(|_| -rng.uniform(0.0, 0.1)).collect();
    let hi: Vec<f64> = (0..n).map(|_| rng.uniform(0.0, 0.1)).collect();
    let mut mag = RealMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                mag.set(i, j, rng.uniform(0.0, 0.05));
            }
        }
    }
    IntervalMatrix::new(nominal, lo, hi, mag).expect("valid model by construction")
}

fn cmd_bench(a: BenchArgs) -> CliResult<u8> {
    if a.reps == 0 {
        return Err(Failure::input("--reps must be at least 1"));
    }
    if a.methods.contains(&MethodArg::OracleEig) {
        if let Some(&n) = a.n.iter().find(|&&n| n > 2048) {
            return Err(Failure::input(format!("oracle_eig supports n <= 2048, got {n}")));
        }
    }

    let mut csv = String::from("n,method,wall_time,verdict\n");
    for &n in &a.n {
        if n == 0 {
            return Err(Failure::input("--n entries must be positive"));
        }
        let model = bench_model(a.seed, n);
        for &method in &a.methods {
            let mut wall = f64::INFINITY;
            let mut verdict = "inconclusive";
            for _ in 0..a.reps {
                let t0 = Instant::now();
                verdict = match method {
                    MethodArg::Gershgorin => {
                        let rep = gershgorin_bounds(model.nominal(), None);
                        if rep.sigma_max < 0.0 {
                            "stable"
                        } else {
                            "inconclusive"
                        }
                    }
                    MethodArg::IntervalGershgorin => {
                        let rep = interval_bounds(&model, None, false);
                        if rep.sigma_max < 0.0 {
                            "stable"
                        } else {
                            "inconclusive"
                        }
                    }
                    MethodArg::OracleEig => {
                        let eigs = eigenvalues_fast(model.nominal())?;
                        let max_re = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
                        if max_re < 0.0 {
                            "stable"
                        } else {
                            "unstable"
                        }
                    }
                };
                wall = wall.min(t0.elapsed().as_secs_f64());
            }
            let _ = writeln!(csv, "{n},{},{wall:.9e},{verdict}", method.tag());
        }
    }

    match &a.csv {
        Some(path) => fs::write(path, csv)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(0)
}
