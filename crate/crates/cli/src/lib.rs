//! Configuration-driven front end for the `dmlpg` benchmarks.

pub mod config;
mod error;
pub mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use run::{execute, execute_with_threads, Command, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "dmlpg", version, about = "Meshless elastostatics benchmarks with DMLPG and MLPG")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Solve the finest configured level and write field profiles.
    Solve(CommonArgs),
    /// Run every level and write a convergence table.
    Study(CommonArgs),
    /// Run the method and its counterpart and write a joined cost/accuracy table.
    Compare(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run description.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `output` in the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for assembly.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Reserved; runs are deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses the config named on the command line and runs the subcommand.
pub fn run_cli(cli: Cli) -> Result<Vec<PathBuf>> {
    let (command, args) = match cli.command {
        CliCommand::Solve(a) => (Command::Solve, a),
        CliCommand::Study(a) => (Command::Study, a),
        CliCommand::Compare(a) => (Command::Compare, a),
    };
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let cfg = RunConfig::parse(&text)?;
    let out = args.out.or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("out"));
    execute_with_threads(command, &cfg, &RunOptions { out, threads: args.threads, seed: args.seed })
}
