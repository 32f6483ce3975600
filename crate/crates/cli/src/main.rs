//! `hystwave`: Riemann fans, wave-front tracking runs, verification reports and oracle
//! sweeps for `u_t + w_t + u_x = 0` with Preisach hysteresis. See `SCHEMA.md` for the
//! output files.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 internal guard.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hystwave_core::wavefront::DEFAULT_EVENT_CAP;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("internal guard tripped: {0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<hystwave_core::Error> for CliError {
    fn from(e: hystwave_core::Error) -> Self {
        use hystwave_core::Error as E;
        match e {
            E::InternalInvariantViolation(_) | E::EventOverflow(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "hystwave", version, about = "Conservation law with Preisach hysteresis: exact Riemann fans and wave-front tracking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `out` in the scenario.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dyadic grid level; overrides `n` in the scenario.
    #[arg(long)]
    pub n: Option<u32>,
    /// Comma-separated checkpoint times; overrides `checkpoints` in the scenario.
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<f64>>,
    /// Seed for random entropy probes and oracle signals.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of interactions before the run is aborted.
    #[arg(long, env = "HYSTWAVE_EVENT_CAP", default_value_t = DEFAULT_EVENT_CAP)]
    pub event_cap: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the Riemann problem of a two-piece scenario; writes fan.csv and profile.csv.
    Riemann(Common),
    /// Discretize and evolve; writes events.csv, fronts.csv, checkpoints.csv and snapshots.
    Cauchy(Common),
    /// Run the verification checks; writes report.csv.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Check a stored fronts.csv instead of computing a fresh trajectory.
        #[arg(long)]
        fronts: Option<PathBuf>,
    },
    /// Compare the staircase Preisach backend with relay banks; writes oracle.csv.
    Oracle(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Riemann(c) => commands::riemann(c),
        Command::Cauchy(c) => commands::cauchy(c),
        Command::Verify { common, fronts } => commands::verify(common, fronts.as_deref()),
        Command::Oracle(c) => commands::oracle(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hystwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
