//! Command-line front end.
//!
//! Every command reads a JSON [`RunConfig`]; flags override the matching
//! config entries. Exit status: 0 success, 2 configuration error, 3 numerical
//! failure, 4 no amplitude bracket.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::Error;
use crate::ivp;
use crate::model::{BoundaryConditions, Problem};
use crate::pruefer::AnglePath;
use crate::shooting::{self, NodalSolution};
use crate::spectrum;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_NOT_FOUND: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "plaplace",
    version,
    about = "One-dimensional p-Laplacian eigenvalues and nodal solutions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues λ_0..λ_{n_max} of the half-linear problem (CSV: n, lambda, residual)
    Eigs(CommonArgs),
    /// Solution with exactly n interior zeros (profile CSV plus JSON summary)
    Solve(CommonArgs),
    /// Terminal angle and zero count over the amplitude grid
    Sweep(CommonArgs),
    /// Existence and nonexistence verdicts for n = 0..n_max (JSON)
    Classify(CommonArgs),
    /// Writes the normalized configuration, with flag overrides applied
    DumpConfig(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output file; standard output when absent
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Terminal-angle tolerance
    #[arg(long, value_name = "FLOAT")]
    pub tol: Option<f64>,
    #[arg(long, value_name = "INT")]
    pub n: Option<usize>,
    #[arg(long = "n-max", value_name = "INT")]
    pub n_max: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Lib(Error::Config(_) | Error::Domain(_)) => EXIT_CONFIG,
            Failure::Lib(Error::NoBracket { .. }) => EXIT_NOT_FOUND,
            Failure::Lib(_) | Failure::Io(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Lib(e) => e.fmt(f),
            Failure::Io(msg) => f.write_str(msg),
        }
    }
}

/// Parses `std::env::args` and runs; returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    let (command, args) = match &cli.command {
        Command::Eigs(a) => ("eigs", a),
        Command::Solve(a) => ("solve", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Classify(a) => ("classify", a),
        Command::DumpConfig(a) => ("dump-config", a),
    };
    match execute(&cli.command, args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("plaplace {command}: {e}");
            e.code()
        }
    }
}

fn load(args: &CommonArgs) -> Result<RunConfig, Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_json(&text)?;
    if let Some(t) = args.tol {
        cfg.params.angle_tol = Some(t);
    }
    if let Some(n) = args.n {
        cfg.params.n = n;
    }
    if let Some(n) = args.n_max {
        cfg.params.n_max = n;
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(f) = args.format {
        cfg.output.format = Some(f);
    }
    Ok(cfg)
}

fn execute(command: &Command, args: &CommonArgs) -> Result<(), Failure> {
    let cfg = load(args)?;
    let (problem, bc) = cfg.build()?;
    let out = cfg.output.path.as_deref();
    match command {
        Command::Eigs(_) => eigs(&cfg, &problem, &bc, out),
        Command::Solve(_) => solve(&cfg, &problem, &bc, out),
        Command::Sweep(_) => sweep(&cfg, &problem, &bc, out),
        Command::Classify(_) => classify(&cfg, &problem, &bc, out),
        Command::DumpConfig(_) => emit(out, cfg.to_json().as_bytes()),
    }
}

/// 17 significant digits.
fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io_err = |e: csv::Error| Failure::Io(format!("csv: {e}"));
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(&row).map_err(io_err)?;
    }
    w.into_inner().map_err(|e| Failure::Io(format!("csv: {e}")))
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("output serializes");
    v.push(b'\n');
    v
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}"))),
    }
}

#[derive(Serialize)]
struct EigenRecord {
    n: usize,
    lambda: f64,
    lambda_interval: (f64, f64),
    residual: f64,
    zero_count: usize,
}

fn eigs(cfg: &RunConfig, problem: &Problem, bc: &BoundaryConditions, out: Option<&Path>) -> Result<(), Failure> {
    let tol = cfg.params.angle_tol.unwrap_or(spectrum::DEFAULT_ANGLE_TOL);
    let pairs = spectrum::eigenvalues_up_to(problem, bc, cfg.params.n_max, tol)?;
    let bytes = match cfg.output.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_bytes(
            &["n", "lambda", "residual"],
            pairs
                .iter()
                .map(|e| vec![e.n.to_string(), sci(e.lambda), sci(e.residual)]),
        )?,
        Format::Json => json_bytes(
            &pairs
                .iter()
                .map(|e| EigenRecord {
                    n: e.n,
                    lambda: e.lambda,
                    lambda_interval: e.lambda_interval,
                    residual: e.residual,
                    zero_count: e.zero_count(),
                })
                .collect::<Vec<_>>(),
        ),
    };
    emit(out, &bytes)
}

#[derive(Serialize)]
struct SolveSummary {
    n: usize,
    rho: f64,
    rho_interval: (f64, f64),
    terminal_angle: f64,
    bc_residual: f64,
    boundary_residuals: (f64, f64),
    zero_count: usize,
    zeros: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    profile: Option<Vec<[f64; 5]>>,
}

fn profile(problem: &Problem, sol: &NodalSolution, points: usize) -> Vec<[f64; 5]> {
    sol.trajectory
        .sample(points)
        .into_iter()
        .map(|[x, y, yp, z]| [x, y, yp, z, ivp::energy(problem, &sol.trajectory, x)])
        .collect()
}

fn angle_csv(path: &AnglePath) -> Result<Vec<u8>, Failure> {
    let rows = path
        .grid()
        .iter()
        .zip(path.theta_nodes())
        .zip(path.r_nodes())
        .map(|((x, t), r)| vec![sci(*x), sci(t), sci(r)]);
    csv_bytes(&["x", "theta", "r"], rows)
}

fn solve(cfg: &RunConfig, problem: &Problem, bc: &BoundaryConditions, out: Option<&Path>) -> Result<(), Failure> {
    let n = cfg.params.n;
    let tol = cfg.params.angle_tol.unwrap_or(shooting::DEFAULT_ANGLE_TOL);
    let sol = match shooting::find_nodal_solution(problem, bc, n, tol) {
        Ok(sol) => sol,
        Err(e @ Error::NoBracket { .. }) => {
            let bounds = cfg.params.ratio_bounds.map(|[lo, hi]| (lo, hi));
            if let Ok(verdicts) = shooting::classify(problem, bc, n, bounds) {
                let v = &verdicts[n];
                eprintln!(
                    "plaplace solve: verdict for n = {n}: {}",
                    serde_json::to_string(v).expect("verdict serializes")
                );
            }
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(p) = &cfg.output.angle_path {
        emit(Some(p), &angle_csv(&sol.path)?)?;
    }
    let points = cfg.params.profile_points.max(2);
    let rows = profile(problem, &sol, points);
    let mut summary = SolveSummary {
        n,
        rho: sol.rho,
        rho_interval: sol.rho_interval,
        terminal_angle: sol.terminal_angle,
        bc_residual: sol.bc_residual,
        boundary_residuals: sol.boundary_residuals,
        zero_count: sol.zero_count(),
        zeros: sol.path.crossings().iter().map(|c| c.x).collect(),
        profile: None,
    };
    match cfg.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let csv = csv_bytes(
                &["x", "y", "yprime", "z", "energy"],
                rows.iter().map(|r| r.iter().map(|v| sci(*v)).collect()),
            )?;
            emit(out, &csv)?;
            let json = json_bytes(&summary);
            match out {
                Some(p) => emit(Some(&p.with_extension("summary.json")), &json),
                None => io::stderr()
                    .lock()
                    .write_all(&json)
                    .map_err(|e| Failure::Io(format!("cannot write to stderr: {e}"))),
            }
        }
        Format::Json => {
            summary.profile = Some(rows);
            emit(out, &json_bytes(&summary))
        }
    }
}

fn sweep(cfg: &RunConfig, problem: &Problem, bc: &BoundaryConditions, out: Option<&Path>) -> Result<(), Failure> {
    let rows = shooting::sweep(problem, bc, &cfg.params.rho_grid.points());
    let bytes = match cfg.output.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_bytes(
            &["rho", "terminal_angle", "zero_count", "error"],
            rows.iter().map(|r| {
                vec![
                    sci(r.rho),
                    r.terminal_angle.map(sci).unwrap_or_default(),
                    r.zero_count.map(|z| z.to_string()).unwrap_or_default(),
                    r.error.clone().unwrap_or_default(),
                ]
            }),
        )?,
        Format::Json => json_bytes(&rows),
    };
    emit(out, &bytes)
}

fn classify(cfg: &RunConfig, problem: &Problem, bc: &BoundaryConditions, out: Option<&Path>) -> Result<(), Failure> {
    let bounds = cfg.params.ratio_bounds.map(|[lo, hi]| (lo, hi));
    let verdicts = shooting::classify(problem, bc, cfg.params.n_max, bounds)?;
    let bytes = match cfg.output.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&verdicts),
        Format::Csv => csv_bytes(
            &["n", "verdict", "lambda_n", "hypothesis"],
            verdicts.iter().map(|v| {
                let verdict = serde_json::to_value(v.verdict).expect("verdict serializes");
                vec![
                    v.n.to_string(),
                    verdict.as_str().unwrap_or_default().to_string(),
                    sci(v.witness.lambda_n),
                    v.witness.hypothesis.clone(),
                ]
            }),
        )?,
    };
    emit(out, &bytes)
}
