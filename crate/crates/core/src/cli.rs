//! Command-line front end: thin wrappers over the library modules plus the scenario runner.
//!
//! Exit codes: 0 on success, 2 on numerical failure, 3 on bad input.

pub mod scenarios;

use crate::core::{Grid1D, Orientation};
use crate::forcing::{Epsilon, Forcing, Profile, Topography};
use crate::frontdyn::{integrate, write_events_csv, write_trajectory_csv, FrontModel, FrontState, IntegrateControls};
use crate::geometry::{
    bifurcation_scan, lobe_intersections, manifold_section, write_section_csv, ManifoldKind, SectionSettings,
};
use crate::melnikov::{write_melnikov_csv, MelnikovFn};
use crate::pde::{self, InitialCondition, PdeOutcome, PdeResult, PdeRunConfig, Scheme, TanhTerm};
use crate::stationary::{
    enumerate_stationary_localized, enumerate_stationary_periodic, one_front_find, periodic_two_front_bifurcation,
    two_front_solve, write_report_json, StationaryFront, StationaryKind,
};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use scenarios::{match_scenarios, with_overrides, Scenario};
use serde::{Deserialize, Serialize};
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "acfront", version, about = "Multi-front dynamics of the weakly heterogeneous Allen-Cahn equation")]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate R(phi) and R'(phi) as CSV.
    Melnikov(MelnikovArgs),
    /// Stationary single fronts at the zeros of R.
    OneFront(OneFrontArgs),
    /// Stationary two-front pattern from a seed, or the reduced (d, s) bifurcation report.
    TwoFront(TwoFrontArgs),
    /// Integrate the reduced N-front ODE.
    Nfront(NfrontArgs),
    /// Enumerate stationary multi-front patterns.
    Stationary(StationaryArgs),
    /// Run a PDE simulation from explicit parameters.
    Pde(PdeArgs),
    /// Manifold sections, lobe intersections and lobe bifurcation scans.
    Manifold(ManifoldArgs),
    /// Run built-in scenarios.
    Scenario(ScenarioArgs),
    /// List the built-in scenarios.
    ListScenarios,
}

#[derive(Debug, Clone, Args)]
struct ForcingArgs {
    /// Forcing spec: `zero`, `topo:<topo>`, `triple:A1,A2,A3,K` or `canonical:<f1>;<f2>;<f3>`.
    #[arg(long, allow_hyphen_values = true)]
    forcing: Option<String>,
    /// Topography spec: `exp:MU`, `alg:P`, `sin:AMP:K`, `mixed:<loc>|<per>|DELTA`, `table:PATH`,
    /// with a leading `-` for valleys.
    #[arg(long, allow_hyphen_values = true)]
    topo: Option<String>,
    /// Periodic triple forcing `A1,A2,A3,K`.
    #[arg(long, allow_hyphen_values = true)]
    periodic: Option<String>,
    /// Homogeneous medium.
    #[arg(long)]
    zero: bool,
}

impl ForcingArgs {
    fn resolve(&self) -> Result<Forcing> {
        let given = [self.forcing.is_some(), self.topo.is_some(), self.periodic.is_some(), self.zero];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(Error::InvalidInput("give exactly one of --forcing, --topo, --periodic, --zero".into()));
        }
        if self.zero {
            return Ok(Forcing::Zero);
        }
        if let Some(t) = &self.topo {
            return Ok(Forcing::topography(t.parse::<Topography>()?));
        }
        if let Some(p) = &self.periodic {
            return format!("triple:{p}").parse();
        }
        self.forcing.as_deref().expect("one selector is set").parse()
    }
}

#[derive(Debug, Args)]
struct MelnikovArgs {
    #[command(flatten)]
    forcing: ForcingArgs,
    /// Sample grid `MIN:MAX:STEP`.
    #[arg(long, default_value = "-6:6:0.01", allow_hyphen_values = true)]
    range: String,
    #[arg(long, default_value = "up")]
    orientation: String,
    /// Force the quadrature backend even when a closed form exists.
    #[arg(long)]
    quadrature: bool,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OneFrontArgs {
    #[command(flatten)]
    forcing: ForcingArgs,
    #[arg(long)]
    eps: f64,
    /// Search interval `MIN:MAX`.
    #[arg(long, default_value = "-10:10", allow_hyphen_values = true)]
    range: String,
    #[arg(long, default_value = "up")]
    orientation: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TwoFrontArgs {
    #[command(flatten)]
    forcing: ForcingArgs,
    #[arg(long)]
    eps: f64,
    /// Seed positions `X1,X2` for the Newton solve.
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    #[arg(long, default_value = "up")]
    first: String,
    /// Reduced (d, s) system `A,B,K` instead of a Newton solve.
    #[arg(long, allow_hyphen_values = true)]
    ds: Option<String>,
    /// Window `LO:HI` of the front separation d for the (d, s) report.
    #[arg(long, default_value = "0.5:12", allow_hyphen_values = true)]
    d_range: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NfrontArgs {
    #[command(flatten)]
    forcing: ForcingArgs,
    #[arg(long)]
    eps: f64,
    /// Initial front positions `X1,X2,...`.
    #[arg(long, allow_hyphen_values = true)]
    init: String,
    #[arg(long, default_value = "up")]
    first: String,
    #[arg(long)]
    t_end: f64,
    /// Spacing of recorded states.
    #[arg(long)]
    output_every: Option<f64>,
    /// Remove colliding pairs and continue (approximate past a merge).
    #[arg(long)]
    merge: bool,
    /// Directory for trajectory.csv and events.csv (trajectory to stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StationaryArgs {
    #[command(flatten)]
    forcing: ForcingArgs,
    #[arg(long)]
    eps: f64,
    /// Number of fronts of localized patterns.
    #[arg(long)]
    n: Option<usize>,
    /// Period cells `C1,C2,...` of a periodic lattice pattern.
    #[arg(long, allow_hyphen_values = true)]
    cells: Option<String>,
    #[arg(long, default_value = "up")]
    first: String,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct PdeArgs {
    #[command(flatten)]
    forcing: ForcingArgs,
    #[arg(long)]
    eps: f64,
    /// Spatial interval `MIN:MAX`.
    #[arg(long, allow_hyphen_values = true)]
    domain: String,
    /// Initial condition `offset + Σ s·tanh(k(x - c))` as `S:C[:K],...`.
    #[arg(long, allow_hyphen_values = true)]
    terms: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    offset: f64,
    #[arg(long)]
    t_end: f64,
    #[arg(long, default_value_t = 0.05)]
    dx: f64,
    #[arg(long, default_value_t = 0.02)]
    dt: f64,
    /// Time stepper.
    #[arg(long, value_enum, default_value = "cn")]
    scheme: SchemeName,
    #[arg(long, default_value = "runs")]
    outdir: PathBuf,
    /// Additional `key=value` overrides of the run configuration.
    #[arg(long = "set")]
    set: Vec<String>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum SchemeName {
    Cn,
    Euler,
    Rk4,
}

#[derive(Debug, Args)]
struct ManifoldArgs {
    /// Coefficient of the default family `F = alpha1 cos(k x) U + f3(x)`.
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<f64>,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    k: f64,
    /// Additive profile `f3` of the default family.
    #[arg(long, default_value = "const:0", allow_hyphen_values = true)]
    f3: String,
    /// Any other forcing spec (replaces the default family).
    #[arg(long, allow_hyphen_values = true)]
    forcing: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    section_x: f64,
    #[arg(long, default_value_t = 4.5)]
    phi_half_width: f64,
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Scan alpha1 over `FROM:TO:STEP` and report the lobe bifurcations.
    #[arg(long, allow_hyphen_values = true)]
    scan: Option<String>,
    /// Directory for the section CSVs (JSON summary on stdout regardless).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario ids; a trailing `*` selects every id with that prefix.
    ids: Vec<String>,
    /// Re-run the configuration stored in a previous run's meta.json.
    #[arg(long)]
    from_meta: Option<PathBuf>,
    #[arg(long, default_value = "runs")]
    outdir: PathBuf,
    /// `key=value` overrides of the run configuration (dotted keys for nested fields).
    #[arg(long = "set")]
    set: Vec<String>,
    /// Number of scenarios run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also integrate the reduced ODE from the initial front positions.
    #[arg(long)]
    ode: bool,
}

/// Entry point of the `acfront` binary; returns the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Melnikov(a) => cmd_melnikov(&a),
        Command::OneFront(a) => cmd_one_front(&a),
        Command::TwoFront(a) => cmd_two_front(&a),
        Command::Nfront(a) => cmd_nfront(&a),
        Command::Stationary(a) => cmd_stationary(&a),
        Command::Pde(a) => cmd_pde(&a),
        Command::Manifold(a) => cmd_manifold(&a),
        Command::Scenario(a) => cmd_scenario(&a),
        Command::ListScenarios => cmd_list_scenarios(),
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn number(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad number `{s}`")))
}

/// Parses a comma-separated list of numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(number).collect()
}

/// Parses `MIN:MAX`.
pub fn parse_interval(s: &str) -> Result<(f64, f64)> {
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 2 {
        return Err(Error::InvalidInput(format!("expected MIN:MAX, got `{s}`")));
    }
    let (a, b) = (number(p[0])?, number(p[1])?);
    if !(b > a) {
        return Err(Error::InvalidInput(format!("empty interval `{s}`")));
    }
    Ok((a, b))
}

/// Parses `FROM:TO:STEP` into the sample points, `TO` included when it lies on the grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let p: Vec<&str> = s.split(':').collect();
    if p.len() != 3 {
        return Err(Error::InvalidInput(format!("expected FROM:TO:STEP, got `{s}`")));
    }
    let (a, b, h) = (number(p[0])?, number(p[1])?, number(p[2])?.abs());
    if !(h > 0.0) || a == b {
        return Err(Error::InvalidInput(format!("degenerate grid `{s}`")));
    }
    let n = ((b - a).abs() / h + 1e-9).floor() as usize;
    if n > 10_000_000 {
        return Err(Error::InvalidInput(format!("grid `{s}` has too many points")));
    }
    let dir = (b - a).signum();
    Ok((0..=n).map(|i| a + dir * h * i as f64).collect())
}

fn cmd_melnikov(a: &MelnikovArgs) -> Result<()> {
    let forcing = a.forcing.resolve()?;
    let o: Orientation = a.orientation.parse()?;
    let f = if a.quadrature { MelnikovFn::quadrature(forcing, o) } else { MelnikovFn::auto(forcing, o) };
    f.validate()?;
    write_melnikov_csv(output(&a.out)?, &f, &parse_grid(&a.range)?)
}

fn cmd_one_front(a: &OneFrontArgs) -> Result<()> {
    let forcing = a.forcing.resolve()?;
    let (lo, hi) = parse_interval(&a.range)?;
    let f = MelnikovFn::auto(forcing, a.orientation.parse()?);
    let fronts = one_front_find(&f, lo, hi, Epsilon::new(a.eps)?)?;
    write_report_json(output(&a.out)?, &fronts)
}

fn cmd_two_front(a: &TwoFrontArgs) -> Result<()> {
    let eps = Epsilon::new(a.eps)?;
    if let Some(ds) = &a.ds {
        let v = parse_list(ds)?;
        if v.len() != 3 {
            return Err(Error::InvalidInput("--ds needs A,B,K".into()));
        }
        let (lo, hi) = parse_interval(&a.d_range)?;
        let report = periodic_two_front_bifurcation(v[0], v[1], v[2], eps, lo, hi)?;
        return write_report_json(output(&a.out)?, &report);
    }
    let seed = parse_list(a.seed.as_deref().ok_or_else(|| Error::InvalidInput("give --seed X1,X2 or --ds A,B,K".into()))?)?;
    if seed.len() != 2 {
        return Err(Error::InvalidInput("--seed needs exactly two positions".into()));
    }
    let model = FrontModel::new(&a.forcing.resolve()?);
    let (front, stability) = two_front_solve([seed[0], seed[1]], a.first.parse()?, eps, &model)?;
    #[derive(Serialize)]
    struct Report {
        front: StationaryFront,
        stability: crate::stationary::TwoFrontStability,
    }
    write_report_json(output(&a.out)?, &Report { front, stability })
}

fn cmd_nfront(a: &NfrontArgs) -> Result<()> {
    let model = FrontModel::new(&a.forcing.resolve()?);
    let s0 = FrontState::new(parse_list(&a.init)?, a.first.parse()?, Epsilon::new(a.eps)?)?;
    let controls = IntegrateControls { merge: a.merge, output_every: a.output_every, ..Default::default() };
    let traj = integrate(&s0, a.t_end, &model, controls)?;
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            write_trajectory_csv(BufWriter::new(File::create(dir.join("trajectory.csv"))?), &traj)?;
            write_events_csv(BufWriter::new(File::create(dir.join("events.csv"))?), &traj.events)?;
        }
        None => write_trajectory_csv(io::stdout().lock(), &traj)?,
    }
    if traj.approximate {
        log::warn!("a colliding pair was removed; the trajectory is approximate past that time");
    }
    Ok(())
}

fn kind_label(k: &StationaryKind) -> (String, String) {
    match k {
        StationaryKind::OneFront { .. } => ("one-front".into(), String::new()),
        StationaryKind::TwoFrontCondition => ("two-front".into(), String::new()),
        StationaryKind::Localized { kind, pattern } => (format!("localized-{kind}"), pattern.clone()),
        StationaryKind::PeriodicGrid { indices } => {
            ("periodic".into(), indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(""))
        }
    }
}

fn write_fronts_csv<W: Write>(out: W, fronts: &[StationaryFront]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "pattern", "positions", "unstable_count", "max_re_eigenvalue", "newton_residual"])?;
    for f in fronts {
        let (kind, pattern) = kind_label(&f.kind);
        let pos = f.positions.iter().map(|p| format!("{p:.10}")).collect::<Vec<_>>().join(";");
        let max_re = f.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        w.write_record([kind, pattern, pos, f.unstable_count.to_string(), max_re.to_string(), f.newton_residual.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_stationary(a: &StationaryArgs) -> Result<()> {
    let forcing = a.forcing.resolve()?;
    let eps = Epsilon::new(a.eps)?;
    let out = output(&a.out)?;
    match (a.n, &a.cells) {
        (Some(n), None) => {
            let topo = forcing
                .as_topography()
                .ok_or_else(|| Error::InvalidInput("localized enumeration needs --topo".into()))?;
            let report = enumerate_stationary_localized(topo, eps, n)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            if report.fronts.len() != report.expected_count {
                log::warn!("found {} patterns, the count law predicts {}", report.fronts.len(), report.expected_count);
            }
            match a.format {
                Format::Csv => write_fronts_csv(out, &report.fronts),
                Format::Json => write_report_json(out, &report),
            }
        }
        (None, Some(cells)) => {
            let cells: Vec<i64> = cells
                .split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad cell `{c}`"))))
                .collect::<Result<_>>()?;
            let report = enumerate_stationary_periodic(&forcing, eps, a.first.parse()?, &cells)?;
            match a.format {
                Format::Csv => {
                    let fronts: Vec<StationaryFront> = report.patterns.iter().map(|p| p.front.clone()).collect();
                    write_fronts_csv(out, &fronts)
                }
                Format::Json => write_report_json(out, &report),
            }
        }
        _ => Err(Error::InvalidInput("give exactly one of --n (localized) or --cells (periodic)".into())),
    }
}

fn parse_terms(s: &str) -> Result<Vec<TanhTerm>> {
    s.split(',')
        .map(|t| {
            let p: Vec<&str> = t.split(':').collect();
            match p.len() {
                2 | 3 => Ok(TanhTerm {
                    sign: number(p[0])?,
                    center: number(p[1])?,
                    steepness: if p.len() == 3 { number(p[2])? } else { 1.0 },
                }),
                _ => Err(Error::InvalidInput(format!("bad tanh term `{t}` (expected S:C[:K])"))),
            }
        })
        .collect()
}

fn cmd_pde(a: &PdeArgs) -> Result<()> {
    let (x_min, x_max) = parse_interval(&a.domain)?;
    let initial = InitialCondition::Terms { terms: parse_terms(&a.terms)?, offset: a.offset };
    let mut config = PdeRunConfig::new(x_min, x_max, a.forcing.resolve()?, a.eps, initial, a.t_end);
    config.dx = a.dx;
    config.scheme = match a.scheme {
        SchemeName::Cn => Scheme::ImexTheta { dt: a.dt, theta: 0.5 },
        SchemeName::Euler => Scheme::ImexTheta { dt: a.dt, theta: 1.0 },
        SchemeName::Rk4 => Scheme::Rk4 { dt: a.dt },
    };
    config.pin_after = 10.0;
    if config.forcing.is_zero() || config.eps == 0.0 {
        config.stop_when_pinned = false;
    }
    let scenario = Scenario { id: "pde".into(), description: "ad hoc PDE run".into(), exploratory: false, config };
    let dir = run_scenario(&scenario, &a.set, &a.outdir, false)?;
    println!("{}", dir.display());
    Ok(())
}

fn manifold_family(k: f64, f3: &Profile) -> impl Fn(f64) -> Forcing + Sync + '_ {
    move |alpha1| Forcing::Canonical { f1: Profile::Cos { amp: alpha1, k }, f2: Profile::zero(), f3: f3.clone() }
}

fn cmd_manifold(a: &ManifoldArgs) -> Result<()> {
    let f3: Profile = a.f3.parse()?;
    let settings = SectionSettings { eps: a.eps, section_x: a.section_x, phi_half_width: a.phi_half_width, n: a.n };
    if let Some(scan) = &a.scan {
        if a.forcing.is_some() {
            return Err(Error::InvalidInput("--scan varies alpha1 of the default family; drop --forcing".into()));
        }
        let grid = parse_grid(scan)?;
        let thresholds = bifurcation_scan(manifold_family(a.k, &f3), &grid, settings, 1e-4)?;
        return write_report_json(io::stdout().lock(), &thresholds);
    }
    let forcing = match (&a.forcing, a.alpha1) {
        (Some(spec), None) => spec.parse::<Forcing>()?,
        (None, Some(alpha1)) => manifold_family(a.k, &f3)(alpha1),
        _ => return Err(Error::InvalidInput("give exactly one of --alpha1 or --forcing".into())),
    };
    let range = (a.section_x - a.phi_half_width, a.section_x + a.phi_half_width);
    let wu = manifold_section(&forcing, a.eps, ManifoldKind::WuMinus, a.section_x, range, a.n)?;
    let ws = manifold_section(&forcing, a.eps, ManifoldKind::WsMinus, a.section_x, range, a.n)?;
    let hits = lobe_intersections(&wu, &ws)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)?;
        write_section_csv(BufWriter::new(File::create(dir.join("wu_minus.csv"))?), &wu)?;
        write_section_csv(BufWriter::new(File::create(dir.join("ws_minus.csv"))?), &ws)?;
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        forcing: &'a Forcing,
        eps: f64,
        section_x: f64,
        count: usize,
        intersections: &'a [crate::geometry::LobeIntersection],
    }
    write_report_json(
        io::stdout().lock(),
        &Summary { forcing: &forcing, eps: a.eps, section_x: a.section_x, count: hits.len(), intersections: &hits },
    )
}

fn cmd_list_scenarios() -> Result<()> {
    let mut out = io::stdout().lock();
    for s in scenarios::builtin_scenarios() {
        let flag = if s.exploratory { " [exploratory]" } else { "" };
        writeln!(out, "{:<32} {}{}", s.id, s.description, flag)?;
    }
    Ok(())
}

/// Contents of `meta.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub scenario: Scenario,
    pub overrides: Vec<String>,
    pub version: String,
    pub created: String,
    pub outcome: Option<PdeOutcome>,
    pub final_time: Option<f64>,
    pub steps: Option<usize>,
    pub surviving_fronts: Option<usize>,
}

const EXPLORATORY_BANNER: &str =
    "EXPLORATORY: H'' is unbounded for this topography; the validity of the reduced front dynamics is open here.";

fn cmd_scenario(a: &ScenarioArgs) -> Result<()> {
    let mut list: Vec<(Scenario, Vec<String>)> = Vec::new();
    if let Some(meta) = &a.from_meta {
        let m: RunMeta = serde_json::from_reader(File::open(meta)?)?;
        let mut overrides = m.overrides.clone();
        overrides.extend(a.set.iter().cloned());
        list.push((m.scenario, overrides));
    }
    for id in &a.ids {
        for s in match_scenarios(id)? {
            list.push((s, a.set.clone()));
        }
    }
    if list.is_empty() {
        return Err(Error::InvalidInput("no scenario given".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot build thread pool: {e}")))?;
    let dirs: Vec<Result<PathBuf>> = pool.install(|| {
        list.par_iter()
            .map(|(s, overrides)| {
                if s.exploratory {
                    eprintln!("{EXPLORATORY_BANNER}");
                }
                run_scenario(s, overrides, &a.outdir, a.ode)
            })
            .collect()
    });
    let several = dirs.len() > 1;
    let mut first_err = None;
    for d in dirs {
        match d {
            Ok(p) => println!("{}", p.display()),
            Err(e) => {
                if several {
                    eprintln!("error: {e}");
                }
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn timestamp_dir(base: &Path) -> Result<PathBuf> {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let mut dir = base.join(&stamp);
    let mut k = 1;
    while dir.exists() {
        dir = base.join(format!("{stamp}-{k}"));
        k += 1;
    }
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

/// Runs `scenario` with `overrides` applied and writes
/// `<outdir>/<id>/<timestamp>/{meta.json, tracks.csv, snapshots/*.csv, events.csv}`.
/// Returns the run directory.
pub fn run_scenario(scenario: &Scenario, overrides: &[String], outdir: &Path, ode: bool) -> Result<PathBuf> {
    let config = with_overrides(&scenario.config, overrides)?;
    let resolved = Scenario { config, ..scenario.clone() };
    let dir = timestamp_dir(&outdir.join(&resolved.id))?;
    let mut meta = RunMeta {
        scenario: resolved.clone(),
        overrides: overrides.to_vec(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        created: chrono::Utc::now().to_rfc3339(),
        outcome: None,
        final_time: None,
        steps: None,
        surviving_fronts: None,
    };
    write_meta(&dir, &meta)?;
    log::info!("running {} into {}", resolved.id, dir.display());
    let result = pde::run(&resolved.config)?;
    write_run_products(&dir, &resolved.config, &result)?;
    meta.outcome = Some(result.outcome);
    meta.final_time = Some(result.final_time);
    meta.steps = Some(result.steps);
    meta.surviving_fronts = result.tracks.last().map(|t| t.positions.len());
    write_meta(&dir, &meta)?;
    if ode {
        run_companion_ode(&dir, &resolved.config)?;
    }
    Ok(dir)
}

fn write_meta(dir: &Path, meta: &RunMeta) -> Result<()> {
    serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join("meta.json"))?), meta)?;
    Ok(())
}

fn write_run_products(dir: &Path, config: &PdeRunConfig, r: &PdeResult) -> Result<()> {
    pde::write_tracks_csv(BufWriter::new(File::create(dir.join("tracks.csv"))?), &r.tracks)?;
    pde::write_pde_events_csv(BufWriter::new(File::create(dir.join("events.csv"))?), &r.events)?;
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    let grid = Grid1D::with_spacing(config.x_min, config.x_max, config.dx)?;
    for (i, s) in r.snapshots.iter().enumerate() {
        let name = format!("{i:04}_t{:.3}.csv", s.t);
        pde::write_snapshot_csv(BufWriter::new(File::create(snaps.join(name))?), &grid, &s.u)?;
    }
    Ok(())
}

/// Front positions and first orientation of a tanh-sum initial condition whose terms alternate.
fn initial_fronts(ic: &InitialCondition) -> Option<(Vec<f64>, Orientation)> {
    match ic {
        InitialCondition::Fronts { positions, first, .. } => Some((positions.clone(), *first)),
        InitialCondition::Terms { terms, .. } => {
            let mut t: Vec<&TanhTerm> = terms.iter().collect();
            t.sort_by(|a, b| a.center.total_cmp(&b.center));
            let signs: Vec<f64> = t.iter().map(|x| x.sign.signum() * x.steepness.signum()).collect();
            if signs.windows(2).any(|w| w[0] == w[1]) {
                return None;
            }
            let first = if signs[0] > 0.0 { Orientation::Up } else { Orientation::Down };
            Some((t.iter().map(|x| x.center).collect(), first))
        }
        InitialCondition::Values(_) => None,
    }
}

fn run_companion_ode(dir: &Path, config: &PdeRunConfig) -> Result<()> {
    let Some((positions, first)) = initial_fronts(&config.initial) else {
        log::warn!("initial condition is not an alternating front train; skipping the reduced ODE");
        return Ok(());
    };
    let Ok(eps) = Epsilon::new(config.eps) else {
        log::warn!("eps = {} is outside (0, 1); skipping the reduced ODE", config.eps);
        return Ok(());
    };
    let s0 = FrontState::new(positions, first, eps)?;
    let controls = IntegrateControls {
        merge: true,
        output_every: Some(config.track_every),
        domain: Some((config.x_min, config.x_max)),
        ..Default::default()
    };
    let traj = integrate(&s0, config.t_end, &FrontModel::new(&config.forcing), controls)?;
    write_trajectory_csv(BufWriter::new(File::create(dir.join("ode_tracks.csv"))?), &traj)?;
    write_events_csv(BufWriter::new(File::create(dir.join("ode_events.csv"))?), &traj.events)?;
    Ok(())
}
