use std::path::PathBuf;

use anyhow::{Context, Result};
use momentnet::{discretize, train, CensusFile, Error, Graphon};
use serde::Serialize;

use crate::manifest::{sidecar, Run};
use crate::params::train_config;

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    /// Census JSON produced by `census`.
    #[arg(long)]
    moments: PathBuf,
    /// Training config of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Config override `KEY=VALUE`; repeatable, applied after --config.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_model: PathBuf,
    /// Training report path (default: `<out-model>.report.json`).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also write the learned graphon on an R x R grid.
    #[arg(long, value_name = "R")]
    dump_grid: Option<usize>,
    /// Grid CSV path (default: `<out-model>.grid.csv`).
    #[arg(long)]
    grid_out: Option<PathBuf>,
}

pub fn run(args: Args) -> Result<()> {
    let run = Run::start("estimate");
    let target = CensusFile::read(&args.moments)?.average_moments()?;
    let cfg = train_config(args.config.as_deref(), &args.overrides, args.seed)?;
    let report_path = args.report.clone().unwrap_or_else(|| sidecar(&args.out_model, ".report.json"));
    let write_report = |text: String| {
        std::fs::write(&report_path, text).with_context(|| format!("writing {}", report_path.display()))
    };

    let (params, report) = match train(&target, &cfg) {
        Ok(ok) => ok,
        Err(Error::NonFinite { epoch, reason, report }) => {
            write_report(report.to_json())?;
            anyhow::bail!("training aborted at epoch {epoch}: {reason} (report in {})", report_path.display());
        }
        Err(e) => return Err(e.into()),
    };
    params.write(&args.out_model)?;
    write_report(report.to_json())?;
    let mut outputs = vec![args.out_model.clone(), report_path.clone()];

    if let Some(r) = args.dump_grid {
        let grid = discretize(&Graphon::model(params.clone()), r)?;
        let path = args.grid_out.clone().unwrap_or_else(|| sidecar(&args.out_model, ".grid.csv"));
        grid.write(&path)?;
        outputs.push(path);
    }

    let manifest = run.finish(
        Some(cfg.seed),
        serde_json::json!({ "args": &args, "config": &cfg }),
        vec![args.moments.clone()],
        outputs,
        None,
    )?;
    manifest.write(&sidecar(&args.out_model, ".manifest.json"))?;
    println!(
        "{} epochs ({:?}), final loss {:.3e}, max residual {:.4}",
        report.epochs_run,
        report.stop_reason,
        report.final_loss,
        report.max_residual()
    );
    Ok(())
}
