//! Command-line front end behind the `frontier` binary.
//!
//! Every command writes into `--out-dir` together with a `manifest.json`
//! holding the arguments, a configuration snapshot and timing. Report files
//! never contain timestamps, so a rerun with the same arguments reproduces
//! them byte for byte; `frontier replay <manifest>` does exactly that.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure.

mod input;
mod plot;
mod report;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

pub use input::{format_point, parse_grid, parse_indices, parse_list, read_sample};
pub use plot::render_svg;
pub use report::{
    read_csv, read_json, read_report, write_csv, write_json, ReportRow, RunManifest, Sidecar, SidecarRow,
    MANIFEST_FILE,
};

use crate::abc::{estimate_abc, AbcConfig};
use crate::error::Error;
use crate::evt::{default_tail_fraction, pickands_xi, weighted_pickands_xi, PickandsWeights};
use crate::interval::{IntervalEstimate, Method};
use crate::limits::{density_pool, simulate_limit, HGrid};
use crate::rng::{self, tag};
use crate::sample::{effective_sample, Sample};
use crate::simlab::{run_study, Dgp, DgpSpec, MethodSpec, StudyConfig, TriangleSampler};
use crate::subsampling::{run_subsampling, SubsamplingConfig};
use crate::tuning::{default_l, subsample_size, Preset};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_NUMERICAL };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser, Serialize)]
#[command(name = "frontier", version, about = "Frontier estimation and inference via extreme quantiles")]
pub struct Cli {
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Frontier points and confidence intervals on a grid of input levels.
    Estimate(EstimateArgs),
    /// Monte Carlo study on a simulation design.
    Simulate(SimulateArgs),
    /// Joint limit density of normalized extreme quantiles.
    Density(DensityArgs),
    /// Draws from the fixed-k limit law.
    Limits(LimitsArgs),
    /// Pickands extreme-value index of the effective samples.
    EvIndex(EvIndexArgs),
    /// SVG of the data with frontier estimates and bands.
    Plot(PlotArgs),
    /// Reruns the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Sub,
    Abc,
}

#[derive(Debug, Args, Serialize)]
pub struct PointArgs {
    /// Query point, coordinates separated by commas; repeatable.
    #[arg(long = "x", allow_negative_numbers = true)]
    pub x: Vec<String>,
    /// One-input grid as `start:stop:step` or `a,b,c`.
    #[arg(long = "x-grid", allow_negative_numbers = true)]
    pub x_grid: Option<String>,
}

impl PointArgs {
    fn points(&self, dim: Option<usize>) -> CliResult<Vec<Vec<f64>>> {
        let mut points = Vec::new();
        for p in &self.x {
            points.push(parse_list(p)?);
        }
        if let Some(g) = &self.x_grid {
            points.extend(parse_grid(g)?.into_iter().map(|v| vec![v]));
        }
        if points.is_empty() {
            return Err(CliError::input("no query points; use --x or --x-grid"));
        }
        if let Some(d) = dim {
            if let Some(bad) = points.iter().find(|p| p.len() != d) {
                return Err(CliError::input(format!(
                    "query point {bad:?} has {} coordinates, the data have {d} inputs",
                    bad.len()
                )));
            }
        }
        Ok(points)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    /// CSV with a header: input columns, then output column(s).
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub points: PointArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Sub)]
    pub method: MethodArg,
    #[arg(long, default_value = "S1")]
    pub preset: Preset,
    /// Number of target quantiles for abc; defaults from the effective size.
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::tuning::DEFAULT_SUBSAMPLES)]
    pub subsamples: usize,
    #[arg(long, default_value_t = crate::tuning::DEFAULT_CHAIN_TOTAL)]
    pub chain_total: usize,
    #[arg(long, default_value_t = crate::tuning::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long, default_value_t = crate::abc::DEFAULT_DENSITY_DRAWS)]
    pub mc_draws: usize,
    /// Miscoverage; intervals have level 1 - alpha.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Tail fraction of the Pickands estimator.
    #[arg(long)]
    pub tail_fraction: Option<f64>,
    /// Work with log outputs; estimates are reported on the log scale.
    #[arg(long)]
    pub log_y: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, default_value = "DGP1")]
    pub dgp: Dgp,
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[command(flatten)]
    pub points: PointArgs,
    /// Engines, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sub")]
    pub method: Vec<MethodArg>,
    #[arg(long, default_value = "S1")]
    pub preset: Preset,
    /// Target counts for abc, comma separated.
    #[arg(long = "L", value_delimiter = ',', default_value = "2")]
    pub l: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::tuning::DEFAULT_SUBSAMPLES)]
    pub subsamples: usize,
    #[arg(long, default_value_t = crate::tuning::DEFAULT_CHAIN_TOTAL)]
    pub chain_total: usize,
    #[arg(long, default_value_t = crate::tuning::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long, default_value_t = crate::abc::DEFAULT_DENSITY_DRAWS)]
    pub mc_draws: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub tail_fraction: Option<f64>,
    /// Sample the triangle design by rejection.
    #[arg(long)]
    pub rejection: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GridArgs {
    /// Full index grid `h0,hm0,h1,...`; overrides --preset and --L.
    #[arg(long)]
    pub h_grid: Option<String>,
    #[arg(long, default_value = "S1")]
    pub preset: Preset,
    #[arg(long = "L", default_value_t = 1)]
    pub l: usize,
    /// Extreme-value index (negative).
    #[arg(long, allow_negative_numbers = true, default_value_t = -0.5)]
    pub xi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GridArgs {
    fn grid(&self) -> CliResult<HGrid> {
        Ok(match &self.h_grid {
            Some(s) => HGrid::from_slice(&parse_indices(s)?)?,
            None => self.preset.grid_with(self.l)?,
        })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Magnitudes `u1,...,uL`; repeatable.
    #[arg(long)]
    pub u: Vec<String>,
    /// One-target grid of magnitudes as `start:stop:step`.
    #[arg(long)]
    pub u_grid: Option<String>,
    #[arg(long, default_value_t = crate::abc::DEFAULT_DENSITY_DRAWS)]
    pub mc_draws: usize,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct LimitsArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EvIndexArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub points: PointArgs,
    #[arg(long)]
    pub tail_fraction: Option<f64>,
    /// Weights of the multi-level estimator, comma separated.
    #[arg(long, allow_negative_numbers = true)]
    pub weights: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    pub base: f64,
    #[arg(long, default_value_t = 2.0)]
    pub spacing: f64,
    #[arg(long)]
    pub log_y: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PlotArgs {
    /// The data CSV that was estimated.
    #[arg(long)]
    pub input: PathBuf,
    /// Report CSV written by `estimate`.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub log_y: bool,
    #[arg(long, default_value = "frontier.svg")]
    pub file: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write into this directory instead of the recorded one.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Files written by a command, plus notes for the manifest.
struct Outcome {
    out_dir: PathBuf,
    outputs: Vec<String>,
    notes: Vec<String>,
    seed: Option<u64>,
    /// Set when outputs were written but the run still failed.
    failure: Option<CliError>,
}

impl Outcome {
    fn new(out_dir: &Path, seed: Option<u64>) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            outputs: Vec::new(),
            notes: Vec::new(),
            seed,
            failure: None,
        }
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.out_dir.join(name)
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    match run(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: &[String]) -> CliResult<()> {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return if code == 0 {
                Ok(())
            } else {
                Err(CliError {
                    code: EXIT_INPUT,
                    message: "invalid arguments".into(),
                })
            };
        }
    };
    if let Command::Replay(r) = &cli.command {
        return replay(r);
    }
    let run_it = || execute(&cli, &args[1..]);
    match cli.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| CliError::input(e.to_string()))?
            .install(run_it),
        None => run_it(),
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

fn execute(cli: &Cli, raw_args: &[String]) -> CliResult<()> {
    let started_unix = unix_now();
    let clock = Instant::now();
    let (name, outcome) = match &cli.command {
        Command::Estimate(a) => ("estimate", prepare(&a.out_dir).and_then(|_| cmd_estimate(a))?),
        Command::Simulate(a) => ("simulate", prepare(&a.out_dir).and_then(|_| cmd_simulate(a))?),
        Command::Density(a) => ("density", prepare(&a.out_dir).and_then(|_| cmd_density(a))?),
        Command::Limits(a) => ("limits", prepare(&a.out_dir).and_then(|_| cmd_limits(a))?),
        Command::EvIndex(a) => ("ev-index", prepare(&a.out_dir).and_then(|_| cmd_ev_index(a))?),
        Command::Plot(a) => ("plot", prepare(&a.out_dir).and_then(|_| cmd_plot(a))?),
        Command::Replay(_) => unreachable!("handled by run"),
    };
    let manifest = RunManifest {
        command: name.to_string(),
        args: raw_args.to_vec(),
        config: serde_json::to_value(cli).map_err(|e| CliError::numerical(e.to_string()))?,
        seed: outcome.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix,
        finished_unix: unix_now(),
        runtime_seconds: clock.elapsed().as_secs_f64(),
        outputs: outcome.outputs.clone(),
        notes: outcome.notes.clone(),
    };
    write_json(&outcome.out_dir.join(MANIFEST_FILE), &manifest)?;
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn prepare(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))
}

fn replay(args: &ReplayArgs) -> CliResult<()> {
    let manifest: RunManifest = read_json(&args.manifest)?;
    let mut argv = vec!["frontier".to_string()];
    let mut recorded = manifest.args.iter();
    while let Some(a) = recorded.next() {
        if args.out_dir.is_some() && a == "--out-dir" {
            recorded.next();
            continue;
        }
        if args.out_dir.is_some() && a.starts_with("--out-dir=") {
            continue;
        }
        argv.push(a.clone());
    }
    if let Some(dir) = &args.out_dir {
        argv.push("--out-dir".into());
        argv.push(dir.display().to_string());
    }
    run(&argv)
}

fn load(input: &Path, log_y: bool, outcome: &mut Outcome) -> CliResult<Sample> {
    let sample = read_sample(input, log_y)?;
    if log_y {
        outcome
            .notes
            .push("outputs were log-transformed; estimates are on the log scale".into());
    }
    Ok(sample)
}

fn estimate_point(a: &EstimateArgs, sample: &Sample, x0: &[f64], seed: u64) -> crate::Result<(IntervalEstimate, Vec<String>)> {
    let es = effective_sample(sample, x0)?;
    let tau = a.tail_fraction.unwrap_or_else(|| default_tail_fraction(es.n_eff()));
    let xi_hat = pickands_xi(&es, tau)?.xi_hat;
    match a.method {
        MethodArg::Sub => {
            let b = subsample_size(sample.len(), es.p_hat())?;
            let mut cfg = SubsamplingConfig::new(a.preset.grid_with(2)?, b, seed);
            cfg.subsamples = a.subsamples;
            cfg.alpha = a.alpha;
            let mut est = run_subsampling(sample, x0, &cfg, xi_hat)?;
            est.diagnostics.insert("tail_fraction".into(), tau);
            Ok((est, Vec::new()))
        }
        MethodArg::Abc => {
            let l = a.l.unwrap_or_else(|| default_l(es.n_eff()));
            let mut cfg = AbcConfig::new(a.preset.grid_with(l)?, seed);
            cfg.chain_total = a.chain_total;
            cfg.burn_in = a.burn_in;
            cfg.density_mc_draws = a.mc_draws;
            let run = estimate_abc(sample, x0, &cfg, xi_hat, a.alpha)?;
            let mut warnings = Vec::new();
            if run.chain.window_warning() {
                warnings.push(format!(
                    "{:.1}% of the posterior lies near the prior window edge",
                    100.0 * run.chain.window_top_mass
                ));
            }
            let mut est = run.estimate;
            est.diagnostics.insert("tail_fraction".into(), tau);
            Ok((est, warnings))
        }
    }
}

fn cmd_estimate(a: &EstimateArgs) -> CliResult<Outcome> {
    let mut outcome = Outcome::new(&a.out_dir, Some(a.seed));
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(CliError::input(format!("alpha {} is outside (0, 1)", a.alpha)));
    }
    let sample = load(&a.input, a.log_y, &mut outcome)?;
    let points = a.points.points(Some(sample.dim()))?;
    let method = match a.method {
        MethodArg::Sub => Method::Sub,
        MethodArg::Abc => Method::Abc,
    };
    let results: Vec<_> = points
        .par_iter()
        .enumerate()
        .map(|(i, x0)| estimate_point(a, &sample, x0, rng::derive_seed(a.seed, &[tag::METHOD, i as u64])))
        .collect();

    let mut rows = Vec::with_capacity(points.len());
    let mut side = Vec::with_capacity(points.len());
    for (x0, result) in points.iter().zip(results) {
        let x = format_point(x0);
        let (n_eff, p_hat) = effective_sample(&sample, x0).map_or((0, 0.0), |es| (es.n_eff(), es.p_hat()));
        match result {
            Ok((est, warnings)) => {
                rows.push(ReportRow {
                    x: x.clone(),
                    n_eff,
                    p_hat,
                    xi_hat: est.diagnostics.get("xi_hat").copied(),
                    point: Some(est.point),
                    lower: Some(est.lower),
                    upper: Some(est.upper),
                    level: est.level,
                    method,
                    status: "OK".into(),
                });
                side.push(SidecarRow {
                    x,
                    status: "OK".into(),
                    diagnostics: est.diagnostics,
                    warnings,
                });
            }
            Err(e) => {
                let status = format!("SKIPPED: {}", e.kind());
                rows.push(ReportRow {
                    x: x.clone(),
                    n_eff,
                    p_hat,
                    xi_hat: None,
                    point: None,
                    lower: None,
                    upper: None,
                    level: 1.0 - a.alpha,
                    method,
                    status: status.clone(),
                });
                side.push(SidecarRow {
                    x,
                    status,
                    diagnostics: Default::default(),
                    warnings: vec![e.to_string()],
                });
            }
        }
    }
    write_csv(&outcome.path("estimate.csv"), &rows)?;
    let sidecar = Sidecar {
        manifest: MANIFEST_FILE.into(),
        report: "estimate.csv".into(),
        notes: outcome.notes.clone(),
        rows: side,
    };
    write_json(&outcome.path("estimate.json"), &sidecar)?;
    if rows.iter().all(|r| !r.is_ok()) {
        outcome.failure = Some(CliError::numerical("no grid point could be estimated"));
    }
    Ok(outcome)
}

fn cmd_simulate(a: &SimulateArgs) -> CliResult<Outcome> {
    let mut outcome = Outcome::new(&a.out_dir, Some(a.seed));
    let mut methods = Vec::new();
    for m in &a.method {
        match m {
            MethodArg::Sub => methods.push(MethodSpec::Sub {
                preset: a.preset,
                subsamples: a.subsamples,
            }),
            MethodArg::Abc => {
                for &l in &a.l {
                    methods.push(MethodSpec::Abc {
                        preset: a.preset,
                        l,
                        chain_total: a.chain_total,
                        burn_in: a.burn_in,
                        mc_draws: a.mc_draws,
                    });
                }
            }
        }
    }
    let x_list = a.points.points(Some(1))?.into_iter().map(|p| p[0]).collect();
    let dgp = DgpSpec {
        id: a.dgp,
        n: a.n,
        sampler: if a.rejection {
            TriangleSampler::Rejection
        } else {
            TriangleSampler::InverseCdf
        },
    };
    let mut cfg = StudyConfig::new(dgp, x_list, methods, a.reps, a.seed);
    cfg.alpha = a.alpha;
    cfg.tail_fraction = a.tail_fraction;
    let report = run_study(&cfg)?;
    write_csv(&outcome.path("study.csv"), &report.rows)?;
    write_csv(&outcome.path("study_records.csv"), &report.records)?;
    #[derive(Serialize)]
    struct StudyJson<'a> {
        manifest: &'a str,
        config: &'a StudyConfig,
        rows: &'a [crate::simlab::StudyRow],
    }
    write_json(
        &outcome.path("study.json"),
        &StudyJson {
            manifest: MANIFEST_FILE,
            config: &cfg,
            rows: &report.rows,
        },
    )?;
    Ok(outcome)
}

#[derive(Serialize)]
struct DensityRow {
    u: String,
    value: f64,
    log_value: f64,
    mc_se: f64,
    draws: usize,
}

fn cmd_density(a: &DensityArgs) -> CliResult<Outcome> {
    let mut outcome = Outcome::new(&a.out_dir, Some(a.grid.seed));
    let grid = a.grid.grid()?;
    let mut points = Vec::new();
    for u in &a.u {
        points.push(parse_list(u)?);
    }
    if let Some(g) = &a.u_grid {
        points.extend(parse_grid(g)?.into_iter().map(|v| vec![v]));
    }
    if points.is_empty() {
        return Err(CliError::input("no magnitudes; use --u or --u-grid"));
    }
    let pool = density_pool(&grid, a.grid.xi, a.mc_draws, a.grid.seed)?;
    let rows = points
        .iter()
        .map(|u| {
            let d = pool.density(u)?;
            Ok(DensityRow {
                u: format_point(u),
                value: d.value,
                log_value: d.log_value,
                mc_se: d.mc_se,
                draws: d.draws,
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    write_csv(&outcome.path("density.csv"), &rows)?;
    Ok(outcome)
}

fn cmd_limits(a: &LimitsArgs) -> CliResult<Outcome> {
    let mut outcome = Outcome::new(&a.out_dir, Some(a.grid.seed));
    let grid = a.grid.grid()?;
    let draws = simulate_limit(&grid, a.grid.xi, a.draws, a.grid.seed)?;
    let path = outcome.path("limits.csv");
    let io = |e: csv::Error| CliError::numerical(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(&path).map_err(io)?;
    let mut header = vec!["draw".to_string()];
    header.extend((1..=grid.l()).map(|l| format!("z{l}")));
    w.write_record(&header).map_err(io)?;
    for (i, d) in draws.iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(d.z_tilde.iter().map(|z| z.to_string()));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::numerical(e.to_string()))?;
    Ok(outcome)
}

#[derive(Serialize)]
struct EvIndexRow {
    x: String,
    n_eff: usize,
    p_hat: f64,
    tail_fraction: Option<f64>,
    xi_hat: Option<f64>,
    finite_endpoint: Option<bool>,
    status: String,
}

fn cmd_ev_index(a: &EvIndexArgs) -> CliResult<Outcome> {
    let mut outcome = Outcome::new(&a.out_dir, None);
    let sample = load(&a.input, a.log_y, &mut outcome)?;
    let points = a.points.points(Some(sample.dim()))?;
    let weights = match &a.weights {
        Some(w) => Some(PickandsWeights {
            weights: parse_list(w)?,
            base: a.base,
            spacing: a.spacing,
        }),
        None => None,
    };
    let rows: Vec<EvIndexRow> = points
        .iter()
        .map(|x0| {
            let x = format_point(x0);
            let es = match effective_sample(&sample, x0) {
                Ok(es) => es,
                Err(e) => {
                    return EvIndexRow {
                        x,
                        n_eff: 0,
                        p_hat: 0.0,
                        tail_fraction: None,
                        xi_hat: None,
                        finite_endpoint: None,
                        status: format!("SKIPPED: {}", e.kind()),
                    }
                }
            };
            let tau = a.tail_fraction.unwrap_or_else(|| default_tail_fraction(es.n_eff()));
            let est = match &weights {
                Some(w) => weighted_pickands_xi(&es, tau, w),
                None => pickands_xi(&es, tau),
            };
            let (xi_hat, finite, status) = match est {
                Ok(e) => (Some(e.xi_hat), Some(e.has_finite_endpoint()), "OK".to_string()),
                Err(e) => (None, None, format!("SKIPPED: {}", e.kind())),
            };
            EvIndexRow {
                x,
                n_eff: es.n_eff(),
                p_hat: es.p_hat(),
                tail_fraction: Some(tau),
                xi_hat,
                finite_endpoint: finite,
                status,
            }
        })
        .collect();
    write_csv(&outcome.path("ev_index.csv"), &rows)?;
    Ok(outcome)
}

fn cmd_plot(a: &PlotArgs) -> CliResult<Outcome> {
    let mut outcome = Outcome::new(&a.out_dir, None);
    let sample = load(&a.input, a.log_y, &mut outcome)?;
    let rows = read_report(&a.report)?;
    let data: Vec<(f64, f64)> = (0..sample.len()).map(|i| (sample.x(i)[0], sample.y(i))).collect();
    let method = rows.first().map_or("".to_string(), |r| r.method.to_string());
    let title = format!("Frontier estimates ({method})");
    let svg = render_svg(&data, &rows, &title);
    let path = outcome.path(&a.file);
    std::fs::write(&path, svg).map_err(|e| CliError::numerical(format!("{}: {e}", path.display())))?;
    Ok(outcome)
}
