use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use momentnet::graph::write_sampled;
use momentnet::rng::derive_seed;
use momentnet::{parse_graphon_spec, sample_graph};
use rayon::prelude::*;
use serde::Serialize;

use crate::manifest::Run;
use crate::params::parse_sizes;

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    /// Graphon: <id>, constant:P, cosine, grid:PATH or model:PATH.
    #[arg(long)]
    graphon: String,
    /// Node counts, e.g. `75,100,...,300`.
    #[arg(long)]
    n: String,
    /// Graphs per node count.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

pub fn stem(n: usize, replicate: usize) -> String {
    format!("g_n{n:05}_r{replicate:03}")
}

pub fn run(args: Args) -> Result<()> {
    let run = Run::start("sample");
    let w = parse_graphon_spec(&args.graphon)?;
    let sizes = parse_sizes(&args.n)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let jobs: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| (0..args.count).map(move |r| (n, r)))
        .collect();
    let stems = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(n, r))| {
            let sample = sample_graph(&w, n, derive_seed(args.seed, i as u64));
            let stem = stem(n, r);
            write_sampled(&args.out, &stem, &sample)?;
            Ok(stem)
        })
        .collect::<Result<Vec<String>>>()?;

    let outputs = stems
        .iter()
        .flat_map(|s| [args.out.join(format!("{s}.edges")), args.out.join(format!("{s}.latents"))])
        .collect();
    let manifest = run.finish(Some(args.seed), &args, vec![], outputs, None)?;
    manifest.write(&args.out.join("manifest.json"))?;
    println!("wrote {} graphs to {}", stems.len(), args.out.display());
    Ok(())
}
