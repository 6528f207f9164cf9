//! `momentnet` command-line pipeline: sample graphs from a graphon, count
//! motifs, fit a graphon to the counts, augment datasets by moment mixing,
//! and evaluate estimates.

mod commands;
mod manifest;
mod params;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "momentnet", version, about)]
struct Cli {
    /// Worker threads for parallel stages (defaults to all cores).
    #[arg(long, global = true, env = "MOMENTNET_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample graphs from a graphon.
    Sample(commands::sample::Args),
    /// Count induced motifs of every graph in a directory.
    Census(commands::census::Args),
    /// Fit a graphon network to a census.
    Estimate(commands::estimate::Args),
    /// Generate a mixup-augmented dataset from two classes.
    Mixup(commands::mixup::Args),
    /// Evaluate a model or grid against a reference graphon.
    Eval(commands::eval::Args),
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    match cli.command {
        Command::Sample(a) => commands::sample::run(a),
        Command::Census(a) => commands::census::run(a),
        Command::Estimate(a) => commands::estimate::run(a),
        Command::Mixup(a) => commands::mixup::run(a),
        Command::Eval(a) => commands::eval::run(a),
    }
}
