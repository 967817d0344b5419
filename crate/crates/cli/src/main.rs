//! `monoqt`: named-state reports, p-sweeps, Monte-Carlo runs and a self-check battery.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use monoqt_core::{Error, OptimizerConfig};

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VERIFY_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const MISMATCH: u8 = 3;
    pub const VIOLATION: u8 = 4;
}

#[derive(Parser, Debug)]
#[command(
    name = "monoqt",
    version,
    about = "Negativity and teleportation-capability monogamy checks for qutrit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct OptimizerArgs {
    /// Random restarts of the fully-entangled-fraction search.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Gradient-ascent iterations per restart.
    #[arg(long, default_value_t = 500)]
    iterations: usize,
}

impl OptimizerArgs {
    fn config(self) -> Result<OptimizerConfig, Error> {
        let cfg = OptimizerConfig {
            restarts: self.restarts,
            max_iterations: self.iterations,
            ..OptimizerConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print measures of a named state as JSON.
    Report {
        /// Ou, KS, Ou_p, KS_p, GHZ3, Product or MaxEnt(d).
        name: String,
        /// Family parameter in [0, 1]; required for Ou_p and KS_p.
        p: Option<f64>,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
    /// Compare closed-form and computed residuals over a p-grid.
    Sweep {
        /// Ou_p or KS_p.
        family: String,
        /// Number of grid points (at least 2).
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Directory for sweep.csv and sweep.svg.
        #[arg(long)]
        out: PathBuf,
        /// Largest accepted |analytic - numeric| before exiting with code 3.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Monte-Carlo monogamy run over random three-qutrit states.
    Sample {
        #[arg(long)]
        n: usize,
        /// haar or canonical.
        #[arg(long, default_value = "haar")]
        sampler: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for samples.csv, scatter.svg and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant battery and print a pass/fail table.
    Verify {
        /// Use 20 random states per check instead of 200.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        optimizer: OptimizerArgs,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("MONOQT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("MONOQT_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Input problems map to the usage code; anything else is an internal failure.
fn error_code(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::OutOfRange(_)
        | Error::UnknownState(_)
        | Error::DimensionMismatch(_)
        | Error::DimensionTooLarge { .. }
        | Error::InvalidCut(_)
        | Error::SubsystemOutOfRange { .. }
        | Error::Io(_) => exit::USAGE,
        _ => exit::VERIFY_FAILED,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Report { name, p, optimizer } => commands::report(&name, p, &optimizer.config()?),
        Command::Sweep {
            family,
            grid,
            out,
            tolerance,
        } => commands::sweep(&family, grid, &out, tolerance),
        Command::Sample { n, sampler, seed, out } => commands::sample(n, &sampler, seed, &out),
        Command::Verify { quick, optimizer } => verify::run(quick, &optimizer.config()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("monoqt: {msg}");
        return ExitCode::from(exit::USAGE);
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("monoqt: {err}");
            ExitCode::from(error_code(&err))
        }
    }
}
