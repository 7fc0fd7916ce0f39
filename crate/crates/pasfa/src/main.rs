use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use pasfa::cli::{cmd_compare, cmd_filter, cmd_simulate, Method};

/// Recursive MMSE inference of ARMA-driven slow features.
#[derive(Parser)]
#[command(name = "pasfa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a trajectory from a model config and write CSV + JSON sidecar.
    Simulate {
        /// Model config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Number of time points.
        #[arg(long, default_value_t = 2000)]
        horizon: usize,
        /// RNG seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output CSV path (sidecar goes to <out>.meta.json).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one estimation method over a trajectory CSV.
    Filter {
        /// Model config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Estimation method.
        #[arg(long, value_enum)]
        method: Method,
        /// Output estimates CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Input trajectory CSV.
        trajectory: PathBuf,
    },
    /// Run seeded trials of all methods and write a comparison report.
    Compare {
        /// Model config JSON.
        #[arg(long)]
        config: PathBuf,
        /// Number of independent seeded trials.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Number of time points per trial.
        #[arg(long, default_value_t = 2000)]
        horizon: usize,
        /// Master seed; per-trial seeds derive from (seed, trial index).
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory for report.json, report.txt, trial CSVs.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            horizon,
            seed,
            out,
        } => cmd_simulate(&config, horizon, seed, &out),
        Command::Filter {
            config,
            method,
            out,
            trajectory,
        } => cmd_filter(&config, &trajectory, method, &out),
        Command::Compare {
            config,
            trials,
            horizon,
            seed,
            out,
        } => cmd_compare(&config, trials, horizon, seed, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
