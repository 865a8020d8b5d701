//! Scenario runner for the curvepipe solvers.
//!
//! A scenario is a JSON file (see [`config::Scenario`]); the verbs `run`,
//! `converge`, `validate` and `stationary` write their artifacts to an
//! output directory and map failures to exit codes.

pub mod config;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{0}")]
    Solver(#[from] curvepipe::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 0 ok, 1 solver domain error, 2 configuration error, 3 instability.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Solver(curvepipe::Error::Instability(_) | curvepipe::Error::Stability(_)) => 3,
            CliError::Solver(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "curvepipe", version, about = "Isentropic flow in curved pipes: front tracking and finite volumes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (default: `params.output_dir` or `out/<scenario>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Dyadic level of the source grid, overriding `params.level`.
    #[arg(long, global = true)]
    level: Option<u32>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a scenario and write snapshots, events, wave diagram and metrics.
    Run { config: PathBuf },
    /// Level cascade with L1 distances between successive levels.
    Converge { config: PathBuf },
    /// Check a scenario without solving.
    Validate { config: PathBuf },
    /// Stationary profile of the scenario's far-left state.
    Stationary { config: PathBuf },
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let opts = run::Options { out: cli.out, level: cli.level, quiet: cli.quiet };
    let (name, path) = match &cli.command {
        Command::Run { config } => ("run", config),
        Command::Converge { config } => ("converge", config),
        Command::Validate { config } => ("validate", config),
        Command::Stationary { config } => ("stationary", config),
    };
    let loaded = match run::load(path) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Run { .. } => run::run(&loaded, &opts),
        Command::Converge { .. } => run::converge(&loaded, &opts),
        Command::Validate { .. } => run::validate(&loaded, &opts),
        Command::Stationary { .. } => run::stationary_profile(&loaded, &opts),
    };
    match result {
        Ok(summary) => {
            if !opts.quiet {
                println!("{}", serde_json::to_string_pretty(&summary).unwrap_or_default());
            }
            0
        }
        Err(e) => {
            run::record_failure(&loaded, &opts, name, &e);
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
