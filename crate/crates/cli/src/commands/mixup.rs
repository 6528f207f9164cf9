use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use momentnet::graph::read_dataset;
use momentnet::mixup::{outcome_details, write_samples, MANIFEST_FILE};
use momentnet::{augment, Graph, MixupConfig};
use serde::Serialize;

use crate::manifest::Run;
use crate::params::train_config;

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    #[arg(long)]
    class_a: PathBuf,
    #[arg(long)]
    class_b: PathBuf,
    /// Weight of class A in the mixed moments.
    #[arg(long)]
    alpha: f64,
    /// Graphs drawn per class for the class averages.
    #[arg(long)]
    n_sample: usize,
    /// Nodes per generated graph.
    #[arg(long)]
    n_nodes: usize,
    #[arg(long)]
    n_graphs: usize,
    /// Class indices of A and B, e.g. `0,1`.
    #[arg(long, default_value = "0,1")]
    labels: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn parse_labels(s: &str) -> Result<(usize, usize)> {
    let Some((a, b)) = s.split_once(',') else {
        bail!("--labels expects two class indices like 0,1");
    };
    Ok((a.trim().parse().context("bad label")?, b.trim().parse().context("bad label")?))
}

fn load(dir: &PathBuf) -> Result<Vec<Graph>> {
    Ok(read_dataset(dir)?.into_iter().map(|(_, g)| g).collect())
}

pub fn run(args: Args) -> Result<()> {
    let run = Run::start("mixup");
    let (label_i, label_j) = parse_labels(&args.labels)?;
    let train = train_config(args.config.as_deref(), &args.overrides, None)?;
    let cfg = MixupConfig {
        alpha: args.alpha,
        n_sample: args.n_sample,
        n_nodes: args.n_nodes,
        n_graphs: args.n_graphs,
        label_i,
        label_j,
        train,
        seed: args.seed,
    };
    cfg.validate()?;
    let a = load(&args.class_a)?;
    let b = load(&args.class_b)?;
    let outcome = augment(&a, &b, &cfg)?;
    let names = write_samples(&args.out, &cfg, &outcome)?;

    let mut outputs: Vec<PathBuf> = names.iter().map(|n| args.out.join(n)).collect();
    outputs.push(args.out.join(momentnet::mixup::LABELS_FILE));
    outputs.push(args.out.join(momentnet::mixup::MODEL_FILE));
    let manifest = run.finish(
        Some(args.seed),
        &args,
        vec![args.class_a.clone(), args.class_b.clone()],
        outputs,
        Some(outcome_details(&cfg, &outcome)),
    )?;
    manifest.write(&args.out.join(MANIFEST_FILE))?;
    println!(
        "generated {} graphs; target edge density {:.4}, max moment residual {:.4}",
        outcome.samples.len(),
        outcome.target.edge_density(),
        outcome.report.max_residual()
    );
    Ok(())
}
