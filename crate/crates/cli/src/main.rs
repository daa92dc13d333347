//! Batch front end: integrate a system, run verification checks or dump local
//! series data, with results written as CSV and JSON.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::{Format, Overrides};
use crate::output::Artifact;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("run aborted: {0}")]
    Abort(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Abort(_) | CliError::Write { .. } => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "painleve-tau",
    version,
    about = "Tau functions and classical actions of isomonodromic systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate along the configured path; writes a trajectory and summary.json.
    Integrate(RunArgs),
    /// Run the configured checks; writes reports.json. Exit 1 if any fails.
    Verify(RunArgs),
    /// Dump local frames and their recursion residuals; writes series.json.
    Series(RunArgs),
    /// Integrate a Schlesinger model and run its checks when any are listed.
    Schlesinger(RunArgs),
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for generated initial data (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory format (overrides `output.format`).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn write_all(dir: &PathBuf, artifacts: &[Artifact]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    for a in artifacts {
        let path = dir.join(&a.name);
        std::fs::write(&path, &a.bytes).map_err(|source| CliError::Write { path, source })?;
    }
    Ok(())
}

type Handler = fn(&config::Job) -> Result<commands::Outcome, CliError>;

fn run(cli: Cli) -> Result<bool, CliError> {
    let (args, command): (&RunArgs, Handler) = match &cli.command {
        Command::Integrate(a) => (a, commands::integrate),
        Command::Verify(a) => (a, commands::verify),
        Command::Series(a) => (a, commands::series),
        Command::Schlesinger(a) => (a, commands::schlesinger),
    };
    let overrides = Overrides {
        out: args.out.clone(),
        seed: args.seed,
        format: args.format,
    };
    let job = config::load(&args.config, &overrides)?;
    let outcome = command(&job)?;
    write_all(&job.out_dir, &outcome.artifacts)?;
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("painleve-tau: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
