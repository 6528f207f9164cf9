//! Moment-matching training loop.
//!
//! Each epoch draws `L` fresh 4-coordinate tuples from sub-stream
//! `1 + epoch` of the configured seed (sub-stream 0 initializes the network),
//! evaluates the weighted moment loss with its exact gradient and takes one
//! Adam step. Training stops at `max_epochs` or when the loss has not improved
//! by the relative threshold for `patience` consecutive epochs.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inr::{self, draw_tuples, loss_and_grad, Activation, InrParams, Tuple};
use crate::motif::{MomentVector, NUM_MOTIFS};
use crate::rng;

/// Sub-stream used for the post-training residual estimate.
const RESIDUAL_STREAM: u64 = u64::MAX;
const TUPLE_STREAM_BASE: u64 = 1;
const MAX_TRAJECTORY_POINTS: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Monte-Carlo tuples per epoch.
    pub samples: usize,
    pub max_epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub patience: usize,
    pub rel_threshold: f64,
    /// Floor applied to target densities before inverting them into weights.
    pub weight_clamp: f64,
    pub resample_tuples: bool,
    pub hidden: usize,
    pub activation: Activation,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            samples: 20_000,
            max_epochs: 5_000,
            learning_rate: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            patience: 200,
            rel_threshold: 1e-5,
            weight_clamp: 1e-6,
            resample_tuples: true,
            hidden: inr::DEFAULT_HIDDEN,
            activation: Activation::Tanh,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub const KEYS: [&'static str; 13] = [
        "samples",
        "max_epochs",
        "learning_rate",
        "beta1",
        "beta2",
        "epsilon",
        "patience",
        "rel_threshold",
        "weight_clamp",
        "resample_tuples",
        "hidden",
        "activation",
        "seed",
    ];

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(m.to_string()));
        if self.samples == 0 {
            return bad("samples must be at least 1");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("beta1 and beta2 must lie in [0, 1)");
        }
        if !(self.epsilon > 0.0) || !(self.weight_clamp > 0.0) || !(self.rel_threshold >= 0.0) {
            return bad("epsilon and weight_clamp must be positive, rel_threshold non-negative");
        }
        if self.hidden == 0 {
            return bad("hidden must be at least 1");
        }
        Ok(())
    }

    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::invalid(format!("`{value}` is not a valid value for {key}")))
        }
        match key {
            "samples" => self.samples = num(key, value)?,
            "max_epochs" => self.max_epochs = num(key, value)?,
            "learning_rate" => self.learning_rate = num(key, value)?,
            "beta1" => self.beta1 = num(key, value)?,
            "beta2" => self.beta2 = num(key, value)?,
            "epsilon" => self.epsilon = num(key, value)?,
            "patience" => self.patience = num(key, value)?,
            "rel_threshold" => self.rel_threshold = num(key, value)?,
            "weight_clamp" => self.weight_clamp = num(key, value)?,
            "resample_tuples" => self.resample_tuples = num(key, value)?,
            "hidden" => self.hidden = num(key, value)?,
            "activation" => self.activation = value.parse()?,
            "seed" => self.seed = num(key, value)?,
            _ => return Err(Error::invalid(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Parses flat `key = value` text on top of the defaults. `#` starts a
    /// comment line.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = TrainConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim()).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "samples = {}", self.samples);
        let _ = writeln!(out, "max_epochs = {}", self.max_epochs);
        let _ = writeln!(out, "learning_rate = {}", self.learning_rate);
        let _ = writeln!(out, "beta1 = {}", self.beta1);
        let _ = writeln!(out, "beta2 = {}", self.beta2);
        let _ = writeln!(out, "epsilon = {}", self.epsilon);
        let _ = writeln!(out, "patience = {}", self.patience);
        let _ = writeln!(out, "rel_threshold = {}", self.rel_threshold);
        let _ = writeln!(out, "weight_clamp = {}", self.weight_clamp);
        let _ = writeln!(out, "resample_tuples = {}", self.resample_tuples);
        let _ = writeln!(out, "hidden = {}", self.hidden);
        let _ = writeln!(out, "activation = {}", self.activation.as_str());
        let _ = writeln!(out, "seed = {}", self.seed);
        out
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_kv_text(&text).map_err(|e| Error::in_file(path, e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxEpochs,
    Plateau,
    NonFinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs_run: usize,
    /// Loss of the last evaluated epoch.
    pub final_loss: f64,
    pub best_loss: f64,
    pub stop_reason: StopReason,
    pub target: [f64; NUM_MOTIFS],
    pub weights: [f64; NUM_MOTIFS],
    /// Moments of the returned model from an independent tuple draw.
    pub final_moments: [f64; NUM_MOTIFS],
    /// `|target - final_moments|` per motif.
    pub residuals: [f64; NUM_MOTIFS],
    /// `(epoch, loss)`, subsampled to at most a few hundred points.
    pub trajectory: Vec<(usize, f64)>,
}

impl TrainReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Inverse-density weights `1 / max(m_F, clamp)`.
pub fn weights_from_moments(m: &MomentVector, clamp: f64) -> [f64; NUM_MOTIFS] {
    m.values.map(|v| 1.0 / v.max(clamp))
}

/// Relative-improvement plateau rule.
///
/// An observation counts as progress when it beats the loss recorded at the
/// last progress point by the relative threshold; `observe` reports a plateau
/// once `patience` consecutive observations made no progress.
#[derive(Clone, Debug)]
pub struct PlateauDetector {
    patience: usize,
    threshold: f64,
    reference: f64,
    best: f64,
    stale: usize,
}

impl PlateauDetector {
    pub fn new(patience: usize, threshold: f64) -> Self {
        PlateauDetector {
            patience,
            threshold,
            reference: f64::INFINITY,
            best: f64::INFINITY,
            stale: 0,
        }
    }

    pub fn observe(&mut self, loss: f64) -> bool {
        self.best = self.best.min(loss);
        if self.reference.is_infinite() || loss < self.reference * (1.0 - self.threshold) {
            self.reference = loss;
            self.stale = 0;
        } else {
            self.stale += 1;
        }
        self.stale >= self.patience
    }

    pub fn best(&self) -> f64 {
        self.best
    }
}

struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(cfg: &TrainConfig, len: usize) -> Self {
        Adam {
            lr: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.epsilon,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    fn step(&mut self, theta: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..theta.len() {
            let g = grad[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            theta[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

/// Monte-Carlo moments of the network from `samples` fresh tuples drawn
/// from the main stream of `seed`.
pub fn estimate_moments(params: &InrParams, samples: usize, seed: u64) -> Result<MomentVector> {
    if samples == 0 {
        return Err(Error::invalid("Monte-Carlo sample count must be at least 1"));
    }
    let tuples = draw_tuples(samples, &mut rng::seeded(seed));
    Ok(inr::mc_moments_with(|lo, hi| params.forward_canonical(lo, hi), &tuples))
}

/// Fits a fresh network to `target`.
pub fn train(target: &MomentVector, cfg: &TrainConfig) -> Result<(InrParams, TrainReport)> {
    let params = InrParams::init_with(cfg.hidden, cfg.activation, cfg.seed)?;
    train_from(params, target, cfg)
}

/// Fits starting from the given parameters.
pub fn train_from(
    mut params: InrParams,
    target: &MomentVector,
    cfg: &TrainConfig,
) -> Result<(InrParams, TrainReport)> {
    cfg.validate()?;
    let weights = weights_from_moments(target, cfg.weight_clamp);
    let fixed: Option<Vec<Tuple>> = (!cfg.resample_tuples)
        .then(|| draw_tuples(cfg.samples, &mut rng::substream(cfg.seed, TUPLE_STREAM_BASE)));
    let stride = cfg.max_epochs.div_ceil(MAX_TRAJECTORY_POINTS).max(1);

    let mut adam = Adam::new(cfg, params.len());
    let mut plateau = PlateauDetector::new(cfg.patience, cfg.rel_threshold);
    let mut trajectory = Vec::new();
    let mut last_loss = f64::NAN;
    let mut stop_reason = StopReason::MaxEpochs;
    let mut epochs_run = 0;

    for epoch in 0..cfg.max_epochs {
        let fresh;
        let tuples = match &fixed {
            Some(t) => t.as_slice(),
            None => {
                fresh = draw_tuples(
                    cfg.samples,
                    &mut rng::substream(cfg.seed, TUPLE_STREAM_BASE + epoch as u64),
                );
                fresh.as_slice()
            }
        };
        let ev = loss_and_grad(&params, tuples, target, &weights);
        epochs_run = epoch + 1;
        if !ev.loss.is_finite() || !ev.grad.is_finite() {
            let report = TrainReport {
                epochs_run,
                final_loss: ev.loss,
                best_loss: plateau.best(),
                stop_reason: StopReason::NonFinite,
                target: target.values,
                weights,
                final_moments: ev.mhat.values,
                residuals: std::array::from_fn(|i| (target[i] - ev.mhat[i]).abs()),
                trajectory,
            };
            return Err(Error::NonFinite {
                epoch,
                reason: format!("loss {} / gradient finite: {}", ev.loss, ev.grad.is_finite()),
                report: Box::new(report),
            });
        }
        last_loss = ev.loss;
        if epoch % stride == 0 {
            trajectory.push((epoch, ev.loss));
        }
        if plateau.observe(ev.loss) {
            stop_reason = StopReason::Plateau;
            break;
        }
        adam.step(params.as_mut_slice(), &ev.grad.values);
    }
    if trajectory.last().is_none_or(|&(e, _)| e + 1 != epochs_run) {
        trajectory.push((epochs_run - 1, last_loss));
    }

    let final_moments = inr::mc_moments_with(
        |lo, hi| params.forward_canonical(lo, hi),
        &draw_tuples(cfg.samples, &mut rng::substream(cfg.seed, RESIDUAL_STREAM)),
    );
    let report = TrainReport {
        epochs_run,
        final_loss: last_loss,
        best_loss: plateau.best(),
        stop_reason,
        target: target.values,
        weights,
        final_moments: final_moments.values,
        residuals: std::array::from_fn(|i| (target[i] - final_moments[i]).abs()),
        trajectory,
    };
    Ok((params, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphon::{discretize, Graphon};

    fn quick_config(seed: u64) -> TrainConfig {
        TrainConfig {
            samples: 2000,
            max_epochs: 600,
            learning_rate: 2e-2,
            patience: 100,
            hidden: 16,
            seed,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn weight_examples() {
        let mut m = MomentVector::constant(0.5);
        m.values[0] = 0.5;
        m.values[1] = 0.25;
        m.values[2] = 0.0;
        m.values[3] = 1.0;
        let w = weights_from_moments(&m, 1e-6);
        assert_eq!(w[0], 2.0);
        assert_eq!(w[1], 4.0);
        assert!((w[2] - 1e6).abs() < 1e-6);
        assert_eq!(w[3], 1.0);
    }

    #[test]
    fn plateau_fires_only_after_patience_without_progress() {
        let mut p = PlateauDetector::new(3, 0.1);
        assert!(!p.observe(10.0));
        assert!(!p.observe(8.0)); // progress (> 10%)
        assert!(!p.observe(7.5)); // < 10% gain
        assert!(!p.observe(7.4));
        assert!(p.observe(7.3)); // third stale epoch
        assert_eq!(p.best(), 7.3);

        let mut p = PlateauDetector::new(2, 0.1);
        for loss in [10.0, 8.9, 7.9, 7.0, 6.2] {
            assert!(!p.observe(loss));
        }
    }

    #[test]
    fn plateau_on_exact_zero_loss() {
        let mut p = PlateauDetector::new(4, 1e-5);
        let fired: Vec<bool> = (0..6).map(|_| p.observe(0.0)).collect();
        assert_eq!(fired, vec![false, false, false, false, true, true]);
    }

    #[test]
    fn config_text_roundtrip_and_overrides() {
        let mut cfg = TrainConfig::default();
        cfg.samples = 123;
        cfg.activation = Activation::Sine;
        cfg.resample_tuples = false;
        cfg.learning_rate = 0.003;
        let back = TrainConfig::from_kv_text(&cfg.to_kv_text()).unwrap();
        assert_eq!(back, cfg);

        let partial = TrainConfig::from_kv_text("# tuned\nsamples = 50\nseed=9\n").unwrap();
        assert_eq!(partial.samples, 50);
        assert_eq!(partial.seed, 9);
        assert_eq!(partial.max_epochs, 5000);

        assert!(TrainConfig::from_kv_text("bogus = 1").is_err());
        assert!(TrainConfig::from_kv_text("samples = 0").is_err());
        assert!(TrainConfig::from_kv_text("samples 5").is_err());
    }

    #[test]
    fn estimate_is_deterministic_and_unbiased_for_constant_half() {
        let zero = InrParams::from_flat(4, Activation::Tanh, 0, vec![0.0; inr::param_count(4)]).unwrap();
        let a = estimate_moments(&zero, 4000, 3).unwrap();
        let b = estimate_moments(&zero, 4000, 3).unwrap();
        assert_eq!(a, b);
        // Zero parameters give exactly 0.5 everywhere, so the estimate is exact.
        assert_eq!(a[0], 0.5);
        assert_eq!(a[8], 0.015625);
        assert!(estimate_moments(&zero, 0, 1).is_err());
    }

    #[test]
    fn training_is_deterministic() {
        let target = MomentVector::constant(0.3);
        let mut cfg = quick_config(4);
        cfg.max_epochs = 40;
        let (a, ra) = train(&target, &cfg).unwrap();
        let (b, rb) = train(&target, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert_eq!(ra.epochs_run, 40);
        assert_eq!(ra.stop_reason, StopReason::MaxEpochs);
    }

    #[test]
    fn already_optimal_start_stops_on_plateau() {
        // A zero network outputs exactly 0.5, so its moments are exact and
        // the loss is identically zero.
        let zero = InrParams::from_flat(8, Activation::Tanh, 0, vec![0.0; inr::param_count(8)]).unwrap();
        let target = MomentVector::constant(0.5);
        let cfg = TrainConfig {
            patience: 20,
            ..quick_config(1)
        };
        let (_, report) = train_from(zero, &target, &cfg).unwrap();
        assert_eq!(report.stop_reason, StopReason::Plateau);
        assert_eq!(report.epochs_run, 21);
        assert_eq!(report.best_loss, 0.0);
    }

    #[test]
    fn running_best_is_monotone() {
        let (_, report) = train(&MomentVector::constant(0.2), &quick_config(2)).unwrap();
        let mut best = f64::INFINITY;
        for &(_, l) in &report.trajectory {
            assert!(l >= 0.0);
            best = best.min(l);
        }
        assert!(report.best_loss <= best);
        assert!(report.epochs_run <= 600);
    }

    #[test]
    fn recovers_a_constant_graphon() {
        let (params, report) = train(&MomentVector::constant(0.3), &quick_config(7)).unwrap();
        let grid = discretize(&Graphon::model(params), 50).unwrap();
        assert!((grid.mean() - 0.3).abs() < 0.02, "mean {}", grid.mean());
        assert!(report.max_residual() < 0.02, "{:?}", report.residuals);
    }

    #[test]
    fn invalid_config_rejected() {
        let cfg = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(train(&MomentVector::constant(0.3), &cfg).is_err());
    }
}
