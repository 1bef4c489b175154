//! `photon-stats`: simulate, correlate and fit photon-statistics data from a
//! single-photon emitter.
//!
//! Exit codes: 0 success, 2 invalid configuration or arguments, 3 I/O or
//! malformed input, 4 every fit failed.

mod commands;
mod config;
mod error;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::correlate::CorrelateArgs;
use commands::fit::FitArgs;
use commands::report::ReportArgs;
use commands::simulate::SimulateArgs;
use commands::spectrum::SpectrumCommand;
use commands::Context;
use config::Config;
use error::{invalid, CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "photon-stats",
    version,
    about = "Photon-statistics workbench for single-photon emitters"
)]
struct Cli {
    /// TOML configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides runs.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and the correlator.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write time tags as CSV instead of the binary format.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate detector clicks.
    Simulate(SimulateArgs),
    /// Build coincidence histograms and normalized g² from tag files.
    Correlate(CorrelateArgs),
    /// Fit g² curves, power sweeps, saturation series or spectra.
    Fit(FitArgs),
    /// Synthesize or analyze a PL spectrum.
    #[command(subcommand)]
    Spectrum(SpectrumCommand),
    /// Merge fit reports into one emitter summary.
    Report(ReportArgs),
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return invalid("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("--jobs: {e}")))?;
    }
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let ctx = Context {
        config,
        seed: cli.seed,
        csv: cli.csv,
    };
    match &cli.command {
        Command::Simulate(a) => commands::simulate::run(&ctx, a),
        Command::Correlate(a) => commands::correlate::run(&ctx, a),
        Command::Fit(a) => commands::fit::run(&ctx, a),
        Command::Spectrum(c) => commands::spectrum::run(&ctx, c),
        Command::Report(a) => commands::report::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
