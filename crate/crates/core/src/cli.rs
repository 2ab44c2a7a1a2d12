//! Command-line front end. Every command that writes files also writes a
//! run manifest next to its main output (`<out>.manifest.json`).
//!
//! Exit codes: 0 success, 1 error, 2 a certificate or tolerance was
//! violated, 64 bad usage.

use crate::asymptotics::fit_expansion;
use crate::error::{Error, Result};
use crate::exact_metrics::{log_density, GrauertParams, ModelMetric, SampleLattice};
use crate::geometry::{build_grid, DomainSpec, Point, Rect, ScalarField};
use crate::hyperbolic::{completeness_probe, koebe_ratio, puncture_probe, GrowthCurve, MetricGraph};
use crate::report::{csv_table, field_csv, FileDigest, ReportFile, RunManifest};
use crate::riemann_map::{boundary_degree, covering_map, green_function, harmonic_conjugate, pullback_identity_check, BranchCut};
use crate::solver::{blowup_ladder, exhaustion_solve, ExhaustionPlan, SolveReport, SolverConfig};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable capping the worker pool.
const CLI_LADDER_STOP_TOL: f64 = 1e-2;
pub const THREADS_VAR: &str = "POINCARE_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "poincare-lab", version, about = "Poincare metrics on planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form metrics.
    Oracle {
        #[command(subcommand)]
        action: OracleCommand,
    },
    /// Run the blow-up ladder on a domain.
    Solve(SolveArgs),
    /// Compare a solved field with a closed-form metric.
    Verify(VerifyArgs),
    /// Fit the boundary expansion along inward normals.
    Expand(ExpandArgs),
    /// Hyperbolic distance growth toward a boundary point or puncture.
    Probe(ProbeArgs),
    /// Extremes of e^{-u}/δ.
    Koebe(KoebeArgs),
    /// Covering map of a simply connected domain onto the unit disk.
    Map(MapArgs),
    /// Solve an exhaustion by windows and classify its limit.
    Dichotomy(DichotomyArgs),
    /// Re-run a manifest and check its outputs reproduce byte for byte.
    Replay(ReplayArgs),
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// CSV of x, y, u, e2u, K over a lattice.
    Eval(OracleArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Manifest path; defaults to `<out>.manifest.json`.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Metric: a name (poincare-disk, half-plane, punctured-disk, strip,
    /// quarter-plane, annulus:B, sinh:BETA, grauert:A), inline JSON or a JSON file.
    #[arg(long)]
    metric: String,
    #[arg(long, value_parser = parse_spacing, default_value = "1/64")]
    spacing: f64,
    /// x0,x1,y0,y1; defaults to the bounding box of the metric's reference domain.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Rect>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Domain: unit-disk, unit-square, half-disk, inline JSON or a JSON file.
    #[arg(long)]
    domain: String,
    #[arg(long, value_parser = parse_spacing)]
    h: f64,
    /// Comma-separated boundary constants; overrides the config.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    ladder: Option<Vec<f64>>,
    /// Solver configuration JSON; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Probe-set change that stops the ladder. Without a config the default is
    /// 1e-2, the `verify` tolerance: the remaining tail is about one last change.
    #[arg(long)]
    ladder_stop_tol: Option<f64>,
    /// Sub/supersolution iteration instead of damped Newton.
    #[arg(long)]
    monotone: bool,
    /// Allowed `δ^2 e^{2u} - 4`.
    #[arg(long, default_value_t = 0.05)]
    barrier_tol: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the field as x, y, u.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    report: PathBuf,
    /// Metric, as for `oracle eval`.
    #[arg(long)]
    oracle: String,
    #[arg(long, default_value_t = 0.2)]
    min_delta: f64,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
}

#[derive(Args, Debug)]
struct ExpandArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["toward", "puncture"])))]
struct ProbeArgs {
    #[arg(long)]
    report: PathBuf,
    /// Start point cx,cy (snapped to the nearest node).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    from: Point,
    /// Arc length of the boundary point to approach.
    #[arg(long)]
    toward: Option<f64>,
    /// Isolated point cx,cy to approach instead.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    puncture: Option<Point>,
    /// Approach direction for --puncture.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "1,0")]
    direction: Point,
    /// Offsets from the target; defaults to 1/2, 1/4, ... down to 2h.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    offsets: Option<Vec<f64>>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct KoebeArgs {
    #[arg(long)]
    report: PathBuf,
    /// Nodes closer than this many cells to the boundary are skipped.
    #[arg(long, default_value_t = 4.0)]
    mask_cells: f64,
    /// Bieberbach constant; the envelope is [1/2, b/2].
    #[arg(long, default_value_t = 4.0)]
    b: f64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, value_parser = parse_spacing, default_value = "1/128")]
    h: f64,
    /// Point sent to 0.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    p: Point,
    /// Solved report on the same domain, for the pullback identity.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Allowed pullback residual when --report is given.
    #[arg(long, default_value_t = 3e-2)]
    pullback_tol: f64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct DichotomyArgs {
    /// Exhaustion plan JSON: windows, h, probes, optional floor metric.
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    #[arg(long)]
    manifest: PathBuf,
}

fn parse_spacing(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("spacing must be positive, got {s}"))
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"))).collect()
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    match parse_list(s)?.as_slice() {
        [x, y] => Ok(Point::new(*x, *y)),
        _ => Err(format!("expected x,y, got {s}")),
    }
}

fn parse_window(s: &str) -> std::result::Result<Rect, String> {
    match parse_list(s)?.as_slice() {
        [x0, x1, y0, y1] if x1 > x0 && y1 > y0 => Ok(Rect::new(*x0, *x1, *y0, *y1)),
        _ => Err(format!("expected x0,x1,y0,y1 with x0 < x1 and y0 < y1, got {s}")),
    }
}

/// Inline JSON, a JSON file, or `None` when `s` is neither.
fn json_arg<T: serde::de::DeserializeOwned>(s: &str) -> Result<Option<T>> {
    if s.trim_start().starts_with('{') {
        return Ok(Some(serde_json::from_str(s)?));
    }
    let path = Path::new(s);
    if path.is_file() {
        return Ok(Some(serde_json::from_str(&std::fs::read_to_string(path)?)?));
    }
    Ok(None)
}

fn parse_domain(s: &str) -> Result<DomainSpec> {
    if let Some(d) = json_arg::<DomainSpec>(s)? {
        d.validate()?;
        return Ok(d);
    }
    match s {
        "unit-disk" => Ok(DomainSpec::UnitDisk),
        "unit-square" => Ok(DomainSpec::unit_square()),
        "half-disk" => Ok(DomainSpec::half_disk(64)),
        _ => Err(Error::InvalidParameter(format!("unknown domain {s:?}"))),
    }
}

fn parse_metric(s: &str) -> Result<ModelMetric> {
    if let Some(m) = json_arg::<ModelMetric>(s)? {
        m.validate()?;
        return Ok(m);
    }
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => {
            let v = a.parse::<f64>().map_err(|e| Error::InvalidParameter(format!("{s:?}: {e}")))?;
            (n, Some(v))
        }
        None => (s, None),
    };
    let m = match (name, arg) {
        ("poincare-disk", None) => ModelMetric::PoincareDisk,
        ("half-plane", None) => ModelMetric::HalfPlane,
        ("punctured-disk", None) => ModelMetric::PuncturedDisk,
        ("strip", None) => ModelMetric::Strip,
        ("quarter-plane", None) => ModelMetric::QuarterPlane,
        ("annulus", Some(b)) => ModelMetric::Annulus { b },
        ("sinh", Some(beta)) => ModelMetric::SinhFamily { beta },
        ("grauert", Some(scale)) => {
            let (a, b, c) = GrauertParams::KRANTZ;
            ModelMetric::Grauert(GrauertParams::new(scale, a, b, c))
        }
        _ => return Err(Error::InvalidParameter(format!("unknown metric {s:?}"))),
    };
    m.validate()?;
    Ok(m)
}

fn load_config(path: &Option<PathBuf>) -> Result<SolverConfig> {
    match path {
        Some(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        None => Ok(SolverConfig::default()),
    }
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    Violated(Vec<String>),
}

impl Outcome {
    fn check(violations: Vec<String>) -> Outcome {
        if violations.is_empty() {
            Outcome::Ok
        } else {
            Outcome::Violated(violations)
        }
    }
}

/// Collects outputs and writes the manifest once the command is done.
struct Run {
    manifest: RunManifest,
    path: Option<PathBuf>,
}

impl Run {
    fn new(argv: &[String]) -> Run {
        Run { manifest: RunManifest::start(argv.to_vec()), path: None }
    }

    fn manifest_at(&mut self, out: &Path, explicit: &OutputArgs) {
        self.path = Some(explicit.manifest.clone().unwrap_or_else(|| {
            let mut s = out.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        }));
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.manifest.inputs.push(FileDigest::of(path)?);
        Ok(())
    }

    fn output(&mut self, path: &Path, contents: &str) -> Result<()> {
        std::fs::write(path, contents)?;
        self.manifest.outputs.push(FileDigest::of(path)?);
        Ok(())
    }

    fn tolerance(&mut self, name: &str, value: f64) {
        self.manifest.tolerances.insert(name.to_string(), value);
    }

    fn finish(mut self) -> Result<()> {
        if let Some(p) = &self.path {
            self.manifest.finish();
            self.manifest.write(p)?;
        }
        Ok(())
    }
}

fn init_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("{THREADS_VAR} must be a positive integer, got {v:?}"))?;
    if n == 0 {
        return Err(format!("{THREADS_VAR} must be at least 1"));
    }
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    let argv = args.get(1..).unwrap_or_default().to_vec();
    match execute(cli.command, &argv) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Violated(v)) => {
            for msg in v {
                eprintln!("violation: {msg}");
            }
            EXIT_VIOLATION
        }
        Err(e @ Error::MonotonicityViolated { .. }) => {
            eprintln!("violation: {e}");
            EXIT_VIOLATION
        }
        Err(e @ Error::InvalidParameter(_)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command, argv: &[String]) -> Result<Outcome> {
    let mut run = Run::new(argv);
    let outcome = match command {
        Command::Oracle { action: OracleCommand::Eval(a) } => oracle_eval(a, &mut run)?,
        Command::Solve(a) => solve(a, &mut run)?,
        Command::Verify(a) => verify(a)?,
        Command::Expand(a) => expand(a, &mut run)?,
        Command::Probe(a) => probe(a, &mut run)?,
        Command::Koebe(a) => koebe(a, &mut run)?,
        Command::Map(a) => map(a, &mut run)?,
        Command::Dichotomy(a) => dichotomy(a, &mut run)?,
        Command::Replay(a) => return replay(a),
    };
    run.finish()?;
    Ok(outcome)
}

fn oracle_eval(a: OracleArgs, run: &mut Run) -> Result<Outcome> {
    let metric = parse_metric(&a.metric)?;
    let window = a.window.unwrap_or_else(|| metric.reference_domain().bounding_box());
    let lattice = SampleLattice { window, spacing: a.spacing, radius: None };
    let mut rows = Vec::new();
    for z in lattice.points() {
        match log_density(&metric, z) {
            Ok(u) => rows.push([z.x, z.y, u, (2.0 * u).exp(), metric.curvature(z)?]),
            Err(Error::SingularPoint { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    run.manifest_at(&a.out, &a.output);
    run.output(&a.out, &csv_table(&["x", "y", "u", "e2u", "K"], rows))?;
    Ok(Outcome::Ok)
}

fn write_report(run: &mut Run, report: &SolveReport, cfg: &SolverConfig, out: &Path, csv: &Option<PathBuf>) -> Result<()> {
    run.output(out, &ReportFile::new(report, cfg).to_json()?)?;
    if let Some(path) = csv {
        run.output(path, &field_csv(&report.u))?;
    }
    Ok(())
}

fn solve(a: SolveArgs, run: &mut Run) -> Result<Outcome> {
    let domain = parse_domain(&a.domain)?;
    let mut cfg = load_config(&a.config)?;
    if let Some(p) = &a.config {
        run.input(p)?;
    }
    if let Some(l) = a.ladder {
        cfg.ladder = l;
    }
    match (a.ladder_stop_tol, &a.config) {
        (Some(t), _) => cfg.ladder_stop_tol = t,
        (None, None) => cfg.ladder_stop_tol = CLI_LADDER_STOP_TOL,
        (None, Some(_)) => {}
    }
    cfg.monotone |= a.monotone;
    let grid = build_grid(&domain, a.h)?;
    let k0 = ScalarField::constant(&grid, 0.0)?;
    let report = blowup_ladder(&grid, &k0, &cfg)?;
    run.manifest_at(&a.out, &a.output);
    run.manifest.domain = Some(domain);
    run.manifest.h = Some(a.h);
    run.tolerance("monotonicity", cfg.monotonicity_tol);
    run.tolerance("barrier", a.barrier_tol);
    run.manifest.config = Some(cfg.clone());
    write_report(run, &report, &cfg, &a.out, &a.csv)?;

    let c = &report.certificates;
    println!("nodes {}, levels {}, verdict {:?}", grid.len(), report.levels.len(), report.verdict);
    println!("monotonicity {:?}, barrier {:?}, tail {:?}", c.monotonicity, c.barrier, c.tail_estimate);
    let mut v = Vec::new();
    if let Some(m) = c.monotonicity.filter(|m| *m > cfg.monotonicity_tol) {
        v.push(format!("monotonicity {m:e} > {:e}", cfg.monotonicity_tol));
    }
    if let Some(b) = c.barrier.filter(|b| *b > a.barrier_tol) {
        v.push(format!("barrier {b:e} > {:e}", a.barrier_tol));
    }
    Ok(Outcome::check(v))
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let metric = parse_metric(&a.oracle)?;
    let report = ReportFile::read(&a.report)?.to_report()?;
    let u = &report.u;
    let grid = u.grid();
    let (mut worst, mut at, mut count) = (0.0f64, Point::default(), 0usize);
    for (k, node) in grid.nodes().iter().enumerate() {
        if grid.domain().boundary_distance_at(node.point) < a.min_delta {
            continue;
        }
        let err = (u.values()[k] - log_density(&metric, node.point)?).abs();
        if err >= worst {
            worst = err;
            at = node.point;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyDomain);
    }
    println!("max |u - oracle| = {worst:.6e} at ({}, {}) over {count} nodes with δ >= {}", at.x, at.y, a.min_delta);
    Ok(Outcome::check(if worst <= a.tol { vec![] } else { vec![format!("max error {worst:e} > {:e}", a.tol)] }))
}

fn expand(a: ExpandArgs, run: &mut Run) -> Result<Outcome> {
    run.input(&a.report)?;
    let report = ReportFile::read(&a.report)?.to_report()?;
    let domain = report.u.grid().domain().clone();
    if a.samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let samples = domain.boundary_samples(domain.boundary_length()? / a.samples as f64)?;
    let mut rows = Vec::new();
    let mut skipped = 0;
    for s in &samples {
        match fit_expansion(&report.u, s, a.order) {
            Ok(f) => {
                let kappa = f.kappa.unwrap_or(f64::NAN);
                rows.push([f.y, kappa, f.u1, 0.5 * kappa, f.u2, f.residual, f.c0, f.log_coefficient, f.log_std_error]);
            }
            Err(Error::ProbeTooShort(_)) | Err(Error::FitIllConditioned) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let good = rows.iter().filter(|r| ((r[2] - r[3]) / r[3]).abs() <= 0.05).count();
    println!("{} fits ({skipped} skipped); u1 within 5% of kappa/2 at {good}", rows.len());
    run.manifest_at(&a.out, &a.output);
    let header = ["y", "kappa", "u1_fit", "u1_theory", "u2_fit", "residual", "c0", "log_coef", "log_stderr"];
    run.output(&a.out, &csv_table(&header, rows))?;
    Ok(Outcome::Ok)
}

fn probe(a: ProbeArgs, run: &mut Run) -> Result<Outcome> {
    run.input(&a.report)?;
    let report = ReportFile::read(&a.report)?.to_report()?;
    let grid = report.u.grid().clone();
    let offsets = a.offsets.unwrap_or_else(|| {
        let mut v = Vec::new();
        let mut o = 0.5;
        while o >= 2.0 * grid.h() {
            v.push(o);
            o *= 0.5;
        }
        v
    });
    let mg = MetricGraph::new(&report.u)?;
    let p = grid.nearest_node(a.from).ok_or_else(|| Error::InvalidParameter("start point is outside the grid".into()))?;
    let curve: GrowthCurve = match (a.toward, a.puncture) {
        (Some(y), _) => completeness_probe(&mg, p, &grid.domain().boundary_point(y)?, &offsets)?,
        (None, Some(c)) => puncture_probe(&mg, p, c, a.direction, &offsets)?,
        (None, None) => unreachable!("clap requires a target"),
    };
    println!("slope {:.6} (complete: {})", curve.slope, curve.is_complete());
    run.manifest_at(&a.out, &a.output);
    let rows = (0..curve.offsets.len()).map(|i| [curve.offsets[i], curve.deltas[i], curve.distances[i]]);
    run.output(&a.out, &csv_table(&["offset", "delta", "distance"], rows))?;
    Ok(Outcome::Ok)
}

#[derive(serde::Serialize)]
struct KoebeOutput {
    min: f64,
    max: f64,
    argmin: Point,
    argmax: Point,
    count: usize,
    lower_bound: f64,
    upper_bound: f64,
    simply_connected: bool,
    within: bool,
}

fn koebe(a: KoebeArgs, run: &mut Run) -> Result<Outcome> {
    run.input(&a.report)?;
    let report = ReportFile::read(&a.report)?.to_report()?;
    let grid = report.u.grid().clone();
    let h = grid.h();
    let delta = grid.boundary_distance();
    let r = koebe_ratio(&report.u, &delta, |k| delta.values()[k] >= a.mask_cells * h)?;
    // The envelope widens by two cells on each side.
    let slack = 2.0 * h;
    let simply_connected = grid.domain().is_simply_connected();
    let out = KoebeOutput {
        min: r.min,
        max: r.max,
        argmin: grid.node(r.argmin).point,
        argmax: grid.node(r.argmax).point,
        count: r.count,
        lower_bound: 0.5 - slack,
        upper_bound: 0.5 * a.b + slack,
        simply_connected,
        within: r.within(a.b, slack),
    };
    println!("ratio in [{:.6}, {:.6}] over {} nodes", r.min, r.max, r.count);
    run.manifest_at(&a.out, &a.output);
    run.tolerance("koebe_slack", slack);
    run.output(&a.out, &(serde_json::to_string_pretty(&out)? + "\n"))?;
    // Outside simple connectivity the envelope is reported, not enforced.
    Ok(Outcome::check(if out.within || !simply_connected {
        vec![]
    } else {
        vec![format!("ratio range [{}, {}] leaves [{}, {}]", r.min, r.max, out.lower_bound, out.upper_bound)]
    }))
}

fn map(a: MapArgs, run: &mut Run) -> Result<Outcome> {
    let domain = parse_domain(&a.domain)?;
    let grid = build_grid(&domain, a.h)?;
    let green = green_function(&grid, a.p)?;
    let conj = harmonic_conjugate(&green, &BranchCut::default())?;
    let phi = covering_map(&green, &conj)?;
    println!("winding {:.6}, boundary degree {:.6}, cycle defect {:.3e}", conj.winding, boundary_degree(&phi)?, conj.cycle_defect);
    run.manifest_at(&a.out, &a.output);
    run.manifest.domain = Some(domain.clone());
    run.manifest.h = Some(a.h);
    let rows = grid.nodes().iter().zip(phi.values()).map(|(n, z)| [n.point.x, n.point.y, z.re, z.im, z.norm()]);
    run.output(&a.out, &csv_table(&["x", "y", "re_phi", "im_phi", "abs_phi"], rows))?;
    let mut v = Vec::new();
    if let Some(path) = &a.report {
        run.input(path)?;
        let file = ReportFile::read(path)?;
        if file.grid.domain != domain || file.grid.h != a.h {
            return Err(Error::GridMismatch);
        }
        let report = file.to_report()?;
        // Rebase the solved field onto this grid; both were built from the same domain.
        let u = ScalarField::new(&grid, report.u.into_values())?;
        let check = pullback_identity_check(&phi, &u, 0.1)?;
        println!("pullback residual sup {:.6e}, rms {:.6e}", check.sup, check.l2);
        run.tolerance("pullback", a.pullback_tol);
        if check.sup > a.pullback_tol {
            v.push(format!("pullback residual {:e} > {:e}", check.sup, a.pullback_tol));
        }
    }
    Ok(Outcome::check(v))
}

fn dichotomy(a: DichotomyArgs, run: &mut Run) -> Result<Outcome> {
    run.input(&a.plan)?;
    let plan: ExhaustionPlan = serde_json::from_str(&std::fs::read_to_string(&a.plan)?)?;
    let cfg = load_config(&a.config)?;
    if let Some(p) = &a.config {
        run.input(p)?;
    }
    let report = exhaustion_solve(&plan, &cfg)?;
    for l in &report.levels {
        println!("window {}: probes {:?}", l.level, l.probe_values);
    }
    println!("verdict {:?}", report.verdict);
    run.manifest_at(&a.out, &a.output);
    run.manifest.h = Some(plan.h);
    run.manifest.config = Some(cfg.clone());
    run.tolerance("monotonicity", cfg.monotonicity_tol);
    run.tolerance("floor", cfg.dichotomy.floor_tolerance);
    write_report(run, &report, &cfg, &a.out, &a.csv)?;
    let c = &report.certificates;
    let mut v = Vec::new();
    if let Some(m) = c.monotonicity.filter(|m| *m > cfg.monotonicity_tol) {
        v.push(format!("windows not decreasing: {m:e}"));
    }
    if let Some(f) = c.floor.filter(|f| *f > cfg.dichotomy.floor_tolerance) {
        v.push(format!("floor violated by {f:e}"));
    }
    Ok(Outcome::check(v))
}

fn replay(a: ReplayArgs) -> Result<Outcome> {
    let recorded = RunManifest::read(&a.manifest)?;
    if recorded.argv.first().is_some_and(|c| c == "replay") {
        return Err(Error::InvalidParameter("a replay manifest cannot be replayed".into()));
    }
    let mut args = vec!["poincare-lab".to_string()];
    args.extend(recorded.argv.iter().cloned());
    let cli = Cli::try_parse_from(&args).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    // The rerun rewrites the manifest; compare against the recorded digests.
    match execute(cli.command, &recorded.argv)? {
        Outcome::Ok => {}
        Outcome::Violated(v) => return Ok(Outcome::Violated(v)),
    }
    let bad = recorded.mismatched_outputs()?;
    println!("{} outputs, {} differ", recorded.outputs.len(), bad.len());
    Ok(Outcome::check(bad.into_iter().map(|p| format!("{p} differs from the recorded digest")).collect()))
}
