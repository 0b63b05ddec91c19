//! Configuration, subcommands and deterministic output for the `bdglab` binary.

pub mod commands;
pub mod config;
pub mod record;
pub mod sweep;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use thiserror::Error;

pub use config::RunConfig;
pub use record::{CommandOutput, ResultRecord, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Inconsistency(_) => 4,
        }
    }
}

impl From<bdglab::Error> for CliError {
    fn from(e: bdglab::Error) -> Self {
        use bdglab::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidGeometry(_) | E::Domain(_) | E::DimensionCap { .. } | E::OutOfRegime(_) | E::Indefinite(_) => {
                CliError::Config(msg)
            }
            E::Inadmissible(_) => CliError::Config(msg),
            E::TailNotConverged { .. } | E::ContractionFailure { .. } | E::Quadrature { .. } | E::EigenNoConvergence => {
                CliError::NonConvergence(msg)
            }
            E::ConstraintViolation(_) | E::SingularReference(_) | E::Inconsistency(_) => CliError::Inconsistency(msg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve the normal-state shift and check the current.
    Normal,
    /// Lowest eigenvalue of the pairing operator and the Birman-Schwinger curve.
    Stability,
    /// Critical temperature over a grid of field strengths.
    TcCurve,
    /// Second-order expansion of the free energy at the normal state.
    Expansion,
    /// Constrained descent of the free energy.
    Minimize,
    /// Cartesian sweep over (T, b, strength) running another command.
    Sweep,
}

#[derive(Debug, Parser)]
#[command(name = "bdglab", version, about = "Numerical laboratory for stationary BdG states in a magnetic field")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (falls back to BDGLAB_WORKERS, then the CPU count).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Overrides the configuration's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

fn workers(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return if n > 0 { Ok(n) } else { Err(CliError::Config("--workers must be positive".into())) };
    }
    match std::env::var("BDGLAB_WORKERS") {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("BDGLAB_WORKERS must be a positive integer, got {s:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(cli.workers)?)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| {
        let single = |out: CommandOutput| -> Result<i32, CliError> {
            out.write(&cli.out)?;
            Ok(if out.converged { 0 } else { 3 })
        };
        match cli.command {
            Command::Normal => single(commands::cmd_normal(&cfg)?),
            Command::Stability => single(commands::cmd_stability(&cfg)?),
            Command::TcCurve => single(commands::cmd_tc_curve(&cfg)?),
            Command::Expansion => single(commands::cmd_expansion(&cfg)?),
            Command::Minimize => single(commands::cmd_minimize(&cfg)?),
            Command::Sweep => {
                let points = sweep::cmd_sweep(&cfg)?;
                sweep::write_sweep(&points, &cli.out)
            }
        }
    })
}
