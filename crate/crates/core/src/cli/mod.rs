//! Command-line front end: experiment sweeps, the analytical table and the
//! exhaustive square checker.

pub mod config;
pub mod preset;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{collision_bounds, success_probability_with, AnalysisError, AnalyticalParams, Interpretation};
use crate::latin::{are_orthogonal, generate_mols, is_prime, LatinError};
use crate::oracle::{check_grids, exhaustive_overlap_check, monte_carlo_lambda, OracleConfig, OracleError, OracleModel};
use crate::sim::SimError;
use config::Overrides;
use preset::{run_experiment, ExperimentPreset, PresetId};

/// Environment variable naming the default output directory of `run`.
pub const OUT_DIR_ENV: &str = "DAIL_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown preset {0:?} (expected exp1, exp2 or exp3)")]
    UnknownPreset(String),
    #[error("at least one seed is required")]
    NoSeeds,
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("write failed: {0}")]
    Write(std::io::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Latin(#[from] LatinError),
}

#[derive(Debug, Parser)]
#[command(name = "dail", version, about = "Latin-rectangle hopping for coexisting body-area networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment sweep and write the summary CSV.
    Run {
        #[arg(long)]
        preset: PresetId,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10")]
        seeds: Vec<u64>,
        /// Summary CSV path; defaults to `<preset>.csv` in $DAIL_OUT_DIR (or the
        /// working directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write per-sensor, per-superframe rows here.
        #[arg(long)]
        per_run: Option<PathBuf>,
        /// `key = value` overrides.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Print the success probability under every interpretation, the
    /// collision bounds and a Monte Carlo estimate.
    Analyze {
        /// Interfering neighbours Q.
        #[arg(long)]
        q: u32,
        /// Channels M.
        #[arg(long, default_value_t = 16)]
        m: u32,
        /// Slots per superframe K.
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0.5)]
        omega: f64,
        /// Orthogonal family size.
        #[arg(long)]
        family_size: u32,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModelArg::Independent)]
        model: ModelArg,
    },
    /// Exhaustively check every complete family up to a prime and the 16x12
    /// cut of order 17.
    Verify {
        #[arg(long, default_value_t = 17)]
        max_prime: usize,
        /// Swap two cells of the largest square before checking.
        #[arg(long)]
        inject_swap: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Independent,
    Latin,
}

/// Runs a parsed command, returning the process exit code.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { preset, seeds, out: path, per_run, config } => {
            let mut p = ExperimentPreset::new(preset);
            if let Some(c) = config {
                p.apply(&Overrides::load(&c)?)?;
            }
            let path = path.unwrap_or_else(|| {
                std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_default().join(format!("{preset}.csv"))
            });
            run_command(&p, &seeds, &path, per_run.as_deref(), out)
        }
        Command::Analyze { q, m, k, omega, family_size, trials, seed, model } => {
            let params = AnalyticalParams::new(q, m, k, omega, family_size)?;
            let model = match model {
                ModelArg::Independent => OracleModel::Independent,
                ModelArg::Latin => OracleModel::LatinFamily,
            };
            analyze(&params, trials, seed, model, out)?;
            Ok(0)
        }
        Command::Verify { max_prime, inject_swap } => verify(max_prime, inject_swap, out),
    }
}

fn create(path: &std::path::Path) -> Result<std::io::BufWriter<std::fs::File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.display().to_string(), source: e })?;
    }
    let f = std::fs::File::create(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    Ok(std::io::BufWriter::new(f))
}

fn run_command(
    preset: &ExperimentPreset,
    seeds: &[u64],
    path: &std::path::Path,
    per_run: Option<&std::path::Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut summary = create(path)?;
    let mut runs = per_run.map(create).transpose()?;
    let outcome = run_experiment(preset, seeds, runs.as_mut().map(|w| w as &mut dyn Write))?;
    outcome.write_csv(&mut summary).map_err(CliError::Write)?;
    summary.flush().map_err(CliError::Write)?;
    if let Some(w) = runs.as_mut() {
        w.flush().map_err(CliError::Write)?;
    }
    let w = |e| CliError::Write(e);
    writeln!(out, "{}: {} rows written to {}", preset.id, outcome.rows.len(), path.display()).map_err(w)?;
    if let Some(v) = outcome.violations.first() {
        writeln!(
            out,
            "{} collision-bound violations; first: {} at {}={} seed {}: {}",
            outcome.violations.len(),
            v.scheme.name(),
            preset.sweep_var.name(),
            v.value,
            v.seed,
            v.violation
        )
        .map_err(w)?;
        return Ok(1);
    }
    Ok(0)
}

/// Prints one line per interpretation, the bounds, and the Monte Carlo row.
pub fn analyze(params: &AnalyticalParams, trials: u64, seed: u64, model: OracleModel, out: &mut dyn Write) -> Result<(), CliError> {
    let w = |e| CliError::Write(e);
    writeln!(
        out,
        "Q={} M={} K={} omega={} m={} Z={}",
        params.neighbors(),
        params.channels(),
        params.slots(),
        params.omega(),
        params.family_size(),
        params.patterns()
    )
    .map_err(w)?;
    for interp in Interpretation::ALL {
        match success_probability_with(params, interp) {
            Ok(v) => writeln!(out, "lambda[{interp}] = {v:.6}"),
            Err(e) => writeln!(out, "lambda[{interp}] = n/a ({e})"),
        }
        .map_err(w)?;
    }
    let (lo, hi) = collision_bounds(params.neighbors(), params.slots());
    writeln!(out, "collision bounds = ({lo},{hi})").map_err(w)?;
    let mut cfg = OracleConfig::new(*params, trials, seed);
    cfg.model = model;
    let est = monte_carlo_lambda(&cfg)?;
    writeln!(out, "monte carlo [{model:?}, {} trials] = {:.6} +/- {:.6}", est.trials, est.estimate, est.std_error).map_err(w)?;
    for warning in &est.warnings {
        writeln!(out, "warning: {warning}").map_err(w)?;
    }
    Ok(())
}

/// Checks family completeness and pattern overlaps; returns 1 on the first
/// problem found.
pub fn verify(max_prime: usize, inject_swap: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let w = |e| CliError::Write(e);
    let primes: Vec<usize> = (2..=max_prime).filter(|&p| is_prime(p)).collect();
    let largest = primes.last().copied();
    let mut targets: Vec<(usize, usize, usize)> = primes.iter().map(|&q| (q, q, q)).collect();
    targets.push((17, 16, 12));
    for (q, rows, cols) in targets {
        let family = generate_mols(q)?;
        let mut grids: Vec<Vec<Vec<u32>>> =
            family.squares().iter().map(|s| (0..rows).map(|i| s.row(i)[..cols].to_vec()).collect()).collect();
        if inject_swap && Some(q) == largest && rows == q {
            grids[0][0].swap(0, 1);
        }
        if rows == q && !inject_swap {
            if family.len() != q - 1 {
                writeln!(out, "FAIL q={q}: family has {} squares, expected {}", family.len(), q - 1).map_err(w)?;
                return Ok(1);
            }
            for (i, a) in family.squares().iter().enumerate() {
                for (j, b) in family.squares().iter().enumerate().skip(i + 1) {
                    if !are_orthogonal(a, b)? {
                        writeln!(out, "FAIL q={q}: squares {i} and {j} are not orthogonal").map_err(w)?;
                        return Ok(1);
                    }
                }
            }
        }
        let report = if inject_swap { check_grids(&grids, q) } else { exhaustive_overlap_check(&family, rows, cols) };
        if let Some(v) = report.violations.first() {
            writeln!(out, "FAIL q={q} {rows}x{cols}: {v}").map_err(w)?;
            return Ok(1);
        }
        writeln!(out, "ok   q={q} {rows}x{cols}: {} squares, {} pattern pairs", family.len(), report.pairs_checked()).map_err(w)?;
    }
    Ok(0)
}
