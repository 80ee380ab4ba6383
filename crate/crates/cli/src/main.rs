//! `latticeperm`: reproducible experiments on lattice circuits and their
//! idealized walks.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 instance too large,
//! 3 a checked property failed.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{read_config_file, Command, ExperimentConfig, Settings};

#[derive(Debug, Parser)]
#[command(name = "latticeperm", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    settings: Settings,
    /// Flat TOML file of settings (keys as flags, with '_' for '-'); flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] latticeperm::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("property violated: {0}")]
    Violation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(latticeperm::Error::Capacity(_)) => 2,
            CliError::Core(latticeperm::Error::Violation { .. }) | CliError::Violation(_) => 3,
            _ => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = cli.config.as_deref().map(read_config_file).transpose()?;
    let config = ExperimentConfig::resolve(
        cli.command,
        cli.settings,
        file,
        latticeperm::RngSeed::from_env().map(|s| s.seed),
    )?;
    if let Some(n) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let outcome = commands::run(&config, &mut std::io::stdin().lock())?;
    let bytes = output::render(&outcome.table, &config)?;
    match &config.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    match outcome.violations.is_empty() {
        true => Ok(()),
        false => Err(CliError::Violation(outcome.violations.join("; "))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("latticeperm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
