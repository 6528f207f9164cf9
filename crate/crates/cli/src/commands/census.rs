use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use momentnet::graph::read_dataset;
use momentnet::{census, CensusFile};
use serde::Serialize;

use crate::manifest::{sidecar, Run};

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    /// Directory of `.edges` files.
    #[arg(long = "in")]
    input: PathBuf,
    /// Census JSON to write.
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: Args) -> Result<()> {
    let run = Run::start("census");
    let dataset = read_dataset(&args.input)?;
    if dataset.is_empty() {
        bail!("no .edges files in {}", args.input.display());
    }
    let (paths, graphs): (Vec<PathBuf>, Vec<_>) = dataset.into_iter().unzip();
    for (p, g) in paths.iter().zip(&graphs) {
        if g.n() < 4 {
            bail!("{}: {} nodes, census needs at least 4", p.display(), g.n());
        }
    }
    let c = census(&graphs)?;
    let file = CensusFile::from(&c);
    std::fs::write(&args.out, file.to_json()).with_context(|| format!("writing {}", args.out.display()))?;

    let manifest = run.finish(None, &args, paths, vec![args.out.clone()], None)?;
    manifest.write(&sidecar(&args.out, ".manifest.json"))?;
    println!("census of {} graphs written to {}", graphs.len(), args.out.display());
    Ok(())
}
