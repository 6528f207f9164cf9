//! Evaluation of an estimate against a reference graphon.
//!
//! Moment distances stand in for Gromov-Wasserstein: they compare the nine
//! motif densities of the estimate (Monte Carlo) with those of the truth
//! (quadrature, and Monte Carlo on the same tuples), and `aligned_mse`
//! compares the two grids after sorting both by degree.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use momentnet::eval::centrality::{analytic_centrality, numeric_centrality, Measure};
use momentnet::eval::metrics::max_abs_deviation;
use momentnet::eval::{
    aligned_mse, exact_moments, lemma1_bound, moment_distance, monte_carlo_moments, sorted_max_deviation,
    theorem_condition, Lemma1, Report,
};
use momentnet::{discretize, parse_graphon_spec, Graphon, GraphonKind, MomentVector};
use serde::Serialize;

use crate::manifest::Run;

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    /// Trained model file to evaluate.
    #[arg(long, conflicts_with_all = ["grid", "graphon"])]
    model: Option<PathBuf>,
    /// Grid CSV to evaluate.
    #[arg(long, conflicts_with = "graphon")]
    grid: Option<PathBuf>,
    /// Any graphon spec to evaluate.
    #[arg(long)]
    graphon: Option<String>,
    /// Reference graphon spec; needed for moment and grid metrics.
    #[arg(long)]
    truth: Option<String>,
    /// Grid resolution for alignment and centrality.
    #[arg(long, default_value_t = 100)]
    resolution: usize,
    /// Monte-Carlo tuples for moment estimates.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    /// Gauss-Legendre nodes per dimension for reference densities.
    #[arg(long, default_value_t = 16)]
    quadrature_nodes: usize,
    /// degree, eigenvector, katz[:ALPHA] or pagerank[:BETA]; repeatable.
    #[arg(long)]
    centrality: Vec<String>,
    /// Bound calculators for `P,n,k,zeta`.
    #[arg(long, value_name = "P,n,k,zeta")]
    theory: Option<String>,
    /// Deviation level for the concentration bound in the theory table.
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for report.txt, profile CSVs and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn subject(args: &Args) -> Result<Option<(String, Graphon)>> {
    let spec = match (&args.model, &args.grid, &args.graphon) {
        (Some(p), _, _) => format!("model:{}", p.display()),
        (_, Some(p), _) => format!("grid:{}", p.display()),
        (_, _, Some(s)) => s.clone(),
        _ => return Ok(None),
    };
    let w = parse_graphon_spec(&spec)?;
    Ok(Some((spec, w)))
}

fn fmt_vec(v: &MomentVector) -> String {
    let parts: Vec<String> = v.values.iter().map(|x| format!("{x:.6}")).collect();
    parts.join(" ")
}

fn parse_theory(s: &str) -> Result<(usize, usize, usize, f64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [p, n, k, z] = parts.as_slice() else {
        bail!("--theory expects P,n,k,zeta");
    };
    Ok((
        p.parse().context("bad P")?,
        n.parse().context("bad n")?,
        k.parse().context("bad k")?,
        z.parse().context("bad zeta")?,
    ))
}

pub fn run(args: Args) -> Result<()> {
    let run = Run::start("eval");
    let subject = subject(&args)?;
    let truth = args.truth.as_deref().map(parse_graphon_spec).transpose()?;
    let measures = args
        .centrality
        .iter()
        .map(|s| s.parse::<Measure>())
        .collect::<momentnet::Result<Vec<_>>>()?;
    if truth.is_none() && measures.is_empty() && args.theory.is_none() {
        bail!("nothing to evaluate: pass --truth, --centrality or --theory");
    }
    if subject.is_none() && (truth.is_some() || !measures.is_empty()) {
        bail!("--truth and --centrality need an estimate: pass --model, --grid or --graphon");
    }

    let mut report = Report::new();
    let mut csvs: Vec<(String, String)> = Vec::new();
    if let Some((spec, w)) = &subject {
        report.section("subject").entry("graphon", spec).entry("label", w.label());
    }

    if let (Some((_, w)), Some(t)) = (&subject, &truth) {
        let est = monte_carlo_moments(w, args.samples, args.seed)?;
        let t_mc = monte_carlo_moments(t, args.samples, args.seed)?;
        let t_exact = exact_moments(t, args.quadrature_nodes)?;
        let vs_exact = moment_distance(&est, &t_exact);
        let vs_mc = moment_distance(&est, &t_mc);
        report
            .section("moments")
            .entry("truth", t.label())
            .entry("samples", args.samples)
            .entry("estimate", fmt_vec(&est))
            .entry("truth_quadrature", fmt_vec(&t_exact))
            .entry("l2_vs_quadrature", vs_exact.l2)
            .entry("linf_vs_quadrature", vs_exact.linf)
            .entry("l2_vs_monte_carlo", vs_mc.l2)
            .entry("linf_vs_monte_carlo", vs_mc.linf);

        let a = discretize(w, args.resolution)?;
        let b = discretize(t, args.resolution)?;
        report
            .section("alignment")
            .entry("resolution", args.resolution)
            .entry("aligned_mse", aligned_mse(&a, &b)?);
    }

    if let Some((_, w)) = &subject {
        let analytic_id = match truth.as_ref().map(|t| t.kind()) {
            Some(GraphonKind::Analytic(id)) if *id == 1 || *id == 2 => Some(*id),
            _ => None,
        };
        for m in &measures {
            let prof = numeric_centrality(w, *m, args.resolution)?;
            let tag = m.to_string().replace(':', "_");
            report.section(format!("centrality {m}")).entry("resolution", args.resolution);
            if let Some(id) = analytic_id {
                let ana = analytic_centrality(id, *m, &prof.xs)?;
                report
                    .entry("max_abs_deviation_vs_analytic", max_abs_deviation(&prof.normalized, &ana.normalized)?)
                    .entry(
                        "sorted_max_deviation_vs_analytic",
                        sorted_max_deviation(&prof.normalized, &ana.normalized)?,
                    );
                csvs.push((format!("centrality_{tag}_analytic.csv"), ana.to_csv()));
            } else if let Some(t) = &truth {
                let reference = numeric_centrality(t, *m, args.resolution)?;
                report.entry(
                    "max_abs_deviation_vs_truth",
                    max_abs_deviation(&prof.normalized, &reference.normalized)?,
                );
            }
            csvs.push((format!("centrality_{tag}.csv"), prof.to_csv()));
        }
    }

    if let Some(spec) = &args.theory {
        let (p, n, k, zeta) = parse_theory(spec)?;
        report.section("theory").entry("P", p).entry("n", n).entry("k", k).entry("epsilon", args.epsilon);
        match lemma1_bound(p, n, k, args.epsilon) {
            Lemma1::Bound { value } => report.entry("lemma1_bound", format!("{value:e}")),
            Lemma1::Inapplicable { bias } => report.entry("lemma1_bound", format!("inapplicable (bias {bias})")),
        };
        let t = theorem_condition(p, n, k, zeta)?;
        report
            .entry("zeta", zeta)
            .entry("N_k", t.n_k)
            .entry("delta_m", format!("{:e}", t.delta_m))
            .entry("n_threshold", t.n_threshold)
            .entry("failure_probability", format!("{:e}", t.failure_probability))
            .entry("eta_cut", t.eta_cut)
            .entry("applies", t.applies)
            .entry("vacuous", t.vacuous);
    }

    let text = report.to_text();
    print!("{text}");
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut outputs = vec![dir.join("report.txt")];
        fs::write(&outputs[0], &text).with_context(|| format!("writing {}", outputs[0].display()))?;
        for (name, body) in &csvs {
            let path = dir.join(name);
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
            outputs.push(path);
        }
        let inputs = args.model.iter().chain(&args.grid).cloned().collect();
        let manifest = run.finish(Some(args.seed), &args, inputs, outputs, None)?;
        manifest.write(&dir.join("manifest.json"))?;
    }
    Ok(())
}
