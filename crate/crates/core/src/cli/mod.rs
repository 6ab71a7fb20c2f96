//! Command-line front end: TOML experiment configs, CSV and manifest output,
//! and run comparisons.
//!
//! Exit codes: 0 on success, 1 for invalid input (config, arguments, or
//! incomparable runs), 2 for failures while running.

mod commands;
mod config;
mod persist;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{cmd_bound, cmd_compare, cmd_run, compare, ComparisonRow};
pub use config::{
    Coefficients, CostsConfig, ExperimentConfig, NetworkConfig, PerServer, PolicyConfig,
    ResolvedConfig, TransferCoefficients, DEFAULT_BETA, DEFAULT_BOUND_DELTA,
    DEFAULT_CONVERGENCE_THRESHOLD, DEFAULT_CONVERGENCE_WINDOW, DEFAULT_DISCOUNT, DEFAULT_TAU,
    SCHEMA_VERSION,
};
pub use persist::{
    csv_file_name, read_csv, write_csv, CsvRun, Manifest, RunEntry, CSV_HEADER, MANIFEST_FILE,
};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "netreserve", version, about = "Online network resource reservation simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every (policy, seed) pair of an experiment config.
    Run {
        /// Experiment config, or the manifest of an earlier run.
        config: PathBuf,
        /// Replace the configured seeds (repeatable).
        #[arg(long = "seed")]
        seeds: Vec<u64>,
        /// Replace the configured output directory.
        #[arg(long)]
        outdir: Option<PathBuf>,
    },
    /// Summarize runs over the same request sequence.
    Compare {
        /// Run CSVs; the first one is the reference for regret deltas.
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        /// Also write the summary table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the cost bound, action count, step size and regret bound.
    Bound {
        config: PathBuf,
        /// Failure probability; defaults to the config's `bound_delta`.
        #[arg(long)]
        delta: Option<f64>,
    },
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> crate::Result<()> {
    match &cli.command {
        Command::Run {
            config,
            seeds,
            outdir,
        } => cmd_run(config, seeds, outdir.as_deref(), out).map(|_| ()),
        Command::Compare { files, out: csv } => cmd_compare(files, csv.as_deref(), out),
        Command::Bound { config, delta } => cmd_bound(config, *delta, out),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_RUNTIME
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
