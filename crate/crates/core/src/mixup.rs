//! Moment-space mixup augmentation.
//!
//! Two classes are summarized by their average motif densities, the vectors
//! are mixed convexly, a network is trained on the mixed target and new
//! graphs are sampled from it. Each generated graph carries a soft label
//! with weight `alpha` on the first class and `1 - alpha` on the second.
//!
//! The mixed vector need not be the moment vector of any graphon, so the
//! trained model may only approximate it; the training residuals are kept in
//! the outcome and in the written manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{sample_graph, write_graph, Graph};
use crate::graphon::Graphon;
use crate::inr::InrParams;
use crate::motif::{census, MomentVector, Provenance, NUM_MOTIFS};
use crate::rng::{derive_seed, seeded};
use crate::trainer::{train, TrainConfig, TrainReport};

const TAG_SELECT_I: u64 = 1;
const TAG_SELECT_J: u64 = 2;
const TAG_GENERATE: u64 = 3;

pub const MODEL_FILE: &str = "model.inr";
pub const LABELS_FILE: &str = "labels.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixupConfig {
    /// Weight of class `label_i` in the mixture.
    pub alpha: f64,
    /// Graphs drawn from each class to form its average moments.
    pub n_sample: usize,
    /// Nodes per generated graph.
    pub n_nodes: usize,
    pub n_graphs: usize,
    pub label_i: usize,
    pub label_j: usize,
    pub train: TrainConfig,
    pub seed: u64,
}

impl MixupConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if self.n_sample == 0 {
            return Err(Error::invalid("n_sample must be at least 1"));
        }
        if self.n_nodes < 4 {
            return Err(Error::invalid(format!("n_nodes must be at least 4, got {}", self.n_nodes)));
        }
        self.train.validate()
    }

    /// Length of the soft-label vectors.
    pub fn num_classes(&self) -> usize {
        self.label_i.max(self.label_j) + 1
    }

    pub fn soft_label(&self) -> Vec<f64> {
        let mut label = vec![0.0; self.num_classes()];
        label[self.label_i] += self.alpha;
        label[self.label_j] += 1.0 - self.alpha;
        label
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedSample {
    pub graph: Graph,
    pub soft_label: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct MixupOutcome {
    /// Indices of the graphs averaged from each class, ascending.
    pub selected: [Vec<usize>; 2],
    pub class_moments: [MomentVector; 2],
    pub target: MomentVector,
    pub model: InrParams,
    pub report: TrainReport,
    pub samples: Vec<AugmentedSample>,
}

/// `alpha * a + (1 - alpha) * b`, elementwise.
pub fn mix_moments(a: &MomentVector, b: &MomentVector, alpha: f64) -> Result<MomentVector> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let mut values = [0.0; NUM_MOTIFS];
    for (i, v) in values.iter_mut().enumerate() {
        *v = (alpha * a[i] + (1.0 - alpha) * b[i]).clamp(0.0, 1.0);
    }
    MomentVector::new(values, Provenance::Mixed { alpha })
}

fn select(class: &[Graph], n_sample: usize, seed: u64, name: &str) -> Result<Vec<usize>> {
    if class.len() < n_sample {
        return Err(Error::invalid(format!(
            "class {name} has {} graphs, n_sample is {n_sample}",
            class.len()
        )));
    }
    let mut picked = index::sample(&mut seeded(seed), class.len(), n_sample).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

fn class_moments(class: &[Graph], picked: &[usize], name: &str) -> Result<MomentVector> {
    let graphs: Vec<Graph> = picked.iter().map(|&i| class[i].clone()).collect();
    census(&graphs)
        .map(|c| c.average)
        .map_err(|e| Error::invalid(format!("class {name}: {e}")))
}

pub fn augment(class_i: &[Graph], class_j: &[Graph], cfg: &MixupConfig) -> Result<MixupOutcome> {
    cfg.validate()?;
    let sel_i = select(class_i, cfg.n_sample, derive_seed(cfg.seed, TAG_SELECT_I), "i")?;
    let sel_j = select(class_j, cfg.n_sample, derive_seed(cfg.seed, TAG_SELECT_J), "j")?;
    let m_i = class_moments(class_i, &sel_i, "i")?;
    let m_j = class_moments(class_j, &sel_j, "j")?;
    let target = mix_moments(&m_i, &m_j, cfg.alpha)?;

    let (model, report) = train(&target, &cfg.train)?;

    let w = Graphon::model(model.clone());
    let gen_seed = derive_seed(cfg.seed, TAG_GENERATE);
    let label = cfg.soft_label();
    let samples = (0..cfg.n_graphs)
        .into_par_iter()
        .map(|g| AugmentedSample {
            graph: sample_graph(&w, cfg.n_nodes, derive_seed(gen_seed, g as u64)).graph,
            soft_label: label.clone(),
        })
        .collect();

    Ok(MixupOutcome {
        selected: [sel_i, sel_j],
        class_moments: [m_i, m_j],
        target,
        model,
        report,
        samples,
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a MixupConfig,
    selected_i: &'a [usize],
    selected_j: &'a [usize],
    class_i_moments: [f64; NUM_MOTIFS],
    class_j_moments: [f64; NUM_MOTIFS],
    target: [f64; NUM_MOTIFS],
    graphs: Vec<String>,
    report: &'a TrainReport,
}

pub fn sample_file_name(index: usize) -> String {
    format!("mix_{index:05}.edges")
}

/// Writes the generated graphs, `labels.tsv` and the model into `dir`,
/// creating it if needed. Returns the graph file names.
pub fn write_samples(dir: &Path, cfg: &MixupConfig, outcome: &MixupOutcome) -> Result<Vec<String>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let names: Vec<String> = (0..outcome.samples.len()).map(sample_file_name).collect();

    let mut labels = String::from("file");
    for c in 0..cfg.num_classes() {
        write!(labels, "\tclass_{c}").unwrap();
    }
    labels.push('\n');
    for (name, s) in names.iter().zip(&outcome.samples) {
        write_graph(&dir.join(name), &s.graph)?;
        labels.push_str(name);
        for v in &s.soft_label {
            write!(labels, "\t{v}").unwrap();
        }
        labels.push('\n');
    }
    let path = dir.join(LABELS_FILE);
    fs::write(&path, labels).map_err(|e| Error::io(&path, e))?;

    outcome.model.write(&dir.join(MODEL_FILE))?;
    Ok(names)
}

/// Configuration, selections, moment vectors and training report as JSON.
pub fn outcome_details(cfg: &MixupConfig, outcome: &MixupOutcome) -> serde_json::Value {
    let manifest = Manifest {
        config: cfg,
        selected_i: &outcome.selected[0],
        selected_j: &outcome.selected[1],
        class_i_moments: outcome.class_moments[0].values,
        class_j_moments: outcome.class_moments[1].values,
        target: outcome.target.values,
        graphs: (0..outcome.samples.len()).map(sample_file_name).collect(),
        report: &outcome.report,
    };
    serde_json::to_value(manifest).expect("manifest serializes")
}

/// [`write_samples`] plus `manifest.json` holding [`outcome_details`].
pub fn write_outcome(dir: &Path, cfg: &MixupConfig, outcome: &MixupOutcome) -> Result<()> {
    write_samples(dir, cfg, outcome)?;
    let mut text = serde_json::to_string_pretty(&outcome_details(cfg, outcome))?;
    text.push('\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::read_dataset;
    use proptest::prelude::*;

    fn er_class(p: f64, count: usize, n: usize, seed: u64) -> Vec<Graph> {
        let w = Graphon::constant(p).unwrap();
        (0..count).map(|i| sample_graph(&w, n, seed + i as u64).graph).collect()
    }

    fn tiny_train() -> TrainConfig {
        TrainConfig {
            samples: 500,
            max_epochs: 30,
            hidden: 8,
            ..TrainConfig::default()
        }
    }

    fn cfg(alpha: f64, n_graphs: usize) -> MixupConfig {
        MixupConfig {
            alpha,
            n_sample: 3,
            n_nodes: 30,
            n_graphs,
            label_i: 0,
            label_j: 1,
            train: tiny_train(),
            seed: 5,
        }
    }

    #[test]
    fn mix_examples() {
        let a = MomentVector::constant(0.2);
        let b = MomentVector::constant(0.8);
        assert_eq!(mix_moments(&a, &b, 1.0).unwrap().values, a.values);
        assert!((mix_moments(&a, &b, 0.5).unwrap().edge_density() - 0.5).abs() < 1e-15);
        let zero = MomentVector::new([0.0; NUM_MOTIFS], Provenance::Exact).unwrap();
        let four = MomentVector::new([0.4; NUM_MOTIFS], Provenance::Exact).unwrap();
        let m = mix_moments(&zero, &four, 0.25).unwrap();
        assert!(m.values.iter().all(|v| (v - 0.3).abs() < 1e-15));
        assert_eq!(m.provenance, Provenance::Mixed { alpha: 0.25 });
        assert!(mix_moments(&a, &b, 1.5).is_err());
        assert!(mix_moments(&a, &b, -0.1).is_err());
    }

    #[test]
    fn soft_labels() {
        assert_eq!(cfg(0.5, 0).soft_label(), vec![0.5, 0.5]);
        let mut c = cfg(0.3, 0);
        c.label_i = 2;
        c.label_j = 0;
        assert_eq!(c.soft_label(), vec![0.7, 0.0, 0.3]);
        c.label_j = 2;
        assert_eq!(c.soft_label(), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn zero_graphs_still_trains_and_writes_model() {
        let a = er_class(0.2, 4, 20, 1);
        let b = er_class(0.6, 4, 20, 50);
        let c = cfg(0.5, 0);
        let out = augment(&a, &b, &c).unwrap();
        assert!(out.samples.is_empty());
        assert_eq!(out.report.epochs_run, 30);
        let dir = tempfile::tempdir().unwrap();
        write_outcome(dir.path(), &c, &out).unwrap();
        assert!(dir.path().join(MODEL_FILE).exists());
        let labels = fs::read_to_string(dir.path().join(LABELS_FILE)).unwrap();
        assert_eq!(labels, "file\tclass_0\tclass_1\n");
    }

    #[test]
    fn augment_is_deterministic_and_writes_everything() {
        let a = er_class(0.2, 5, 20, 1);
        let b = er_class(0.6, 5, 20, 50);
        let c = cfg(0.25, 3);
        let x = augment(&a, &b, &c).unwrap();
        let y = augment(&a, &b, &c).unwrap();
        assert_eq!(x.selected, y.selected);
        assert_eq!(x.model, y.model);
        assert_eq!(x.samples, y.samples);
        assert_eq!(x.selected[0].len(), 3);
        assert!(x.selected[0].windows(2).all(|w| w[0] < w[1]));
        for s in &x.samples {
            assert_eq!(s.graph.n(), 30);
            assert_eq!(s.soft_label, vec![0.25, 0.75]);
        }

        let dir = tempfile::tempdir().unwrap();
        write_outcome(dir.path(), &c, &x).unwrap();
        let graphs = read_dataset(dir.path()).unwrap();
        assert_eq!(graphs.len(), 3);
        assert_eq!(graphs[0].1, x.samples[0].graph);
        let labels = fs::read_to_string(dir.path().join(LABELS_FILE)).unwrap();
        assert_eq!(labels.lines().nth(1).unwrap(), "mix_00000.edges\t0.25\t0.75");
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
        assert_eq!(manifest["config"]["alpha"], 0.25);
        assert_eq!(manifest["report"]["epochs_run"], 30);
        assert_eq!(InrParams::read(&dir.path().join(MODEL_FILE)).unwrap(), x.model);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = er_class(0.2, 2, 20, 1);
        let b = er_class(0.6, 5, 20, 50);
        assert!(augment(&a, &b, &cfg(0.5, 1)).is_err());
        let mut c = cfg(0.5, 1);
        c.n_nodes = 3;
        assert!(augment(&b, &b, &c).is_err());
        let tiny = vec![Graph::complete(3); 5];
        assert!(augment(&tiny, &b, &cfg(0.5, 1)).is_err());
    }

    proptest! {
        #[test]
        fn soft_label_is_a_distribution(alpha in 0.0f64..=1.0, i in 0usize..4, j in 0usize..4) {
            let mut c = cfg(alpha, 0);
            c.label_i = i;
            c.label_j = j;
            let l = c.soft_label();
            prop_assert!(l.iter().all(|v| *v >= 0.0));
            prop_assert!((l.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn mixing_stays_between_endpoints(p in 0.0f64..=1.0, q in 0.0f64..=1.0, alpha in 0.0f64..=1.0) {
            let a = MomentVector::constant(p);
            let b = MomentVector::constant(q);
            let m = mix_moments(&a, &b, alpha).unwrap();
            for i in 0..NUM_MOTIFS {
                let (lo, hi) = (a[i].min(b[i]), a[i].max(b[i]));
                prop_assert!(m[i] >= lo - 1e-15 && m[i] <= hi + 1e-15);
            }
        }
    }
}
