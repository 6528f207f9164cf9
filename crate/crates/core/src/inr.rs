//! One-hidden-layer coordinate network `f: [0,1]^2 -> (0,1)` used as the
//! estimated graphon, its Monte-Carlo motif densities and the exact gradient
//! of the weighted moment loss.
//!
//! The network sees the canonical pair `(min(x, y), max(x, y))`, so it is
//! symmetric by construction:
//!
//! ```text
//! f(x, y) = sigmoid( b_out + sum_h w_out[h] * act(w_lo[h] lo + w_hi[h] hi + b_in[h]) )
//! ```
//!
//! Parameters live in one flat vector laid out as `w_lo` (`H`), `w_hi` (`H`),
//! `b_in` (`H`), `w_out` (`H`), `b_out` (1), where `w_lo`/`w_hi` are the
//! input weights of the smaller and larger coordinate.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motif::{MomentVector, Provenance, MOTIFS, NUM_MOTIFS, PAIRS};
use crate::rng::{self, StreamRng};

pub const DEFAULT_HIDDEN: usize = 64;
const MODEL_MAGIC: &str = "# momentnet-inr";
const MODEL_VERSION: u32 = 1;

/// Tuples per parallel work unit. Fixed so partial sums are reduced in the
/// same order for any thread count.
const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Tanh,
    Sine,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Tanh => z.tanh(),
            Activation::Sine => z.sin(),
        }
    }

    /// Returns `(act(z), act'(z))`.
    #[inline]
    fn with_derivative(self, z: f64) -> (f64, f64) {
        match self {
            Activation::Tanh => {
                let t = z.tanh();
                (t, 1.0 - t * t)
            }
            Activation::Sine => {
                let (s, c) = z.sin_cos();
                (s, c)
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
            Activation::Sine => "sine",
        }
    }
}

impl FromStr for Activation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tanh" => Ok(Activation::Tanh),
            "sine" | "sin" => Ok(Activation::Sine),
            _ => Err(Error::invalid(format!("unknown activation `{s}`"))),
        }
    }
}

#[inline]
fn sigmoid(o: f64) -> f64 {
    if o >= 0.0 {
        1.0 / (1.0 + (-o).exp())
    } else {
        let e = o.exp();
        e / (1.0 + e)
    }
}

/// Network parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct InrParams {
    hidden: usize,
    activation: Activation,
    seed: u64,
    theta: Vec<f64>,
}

/// Gradient with the same flat layout as [`InrParams`].
#[derive(Clone, Debug, PartialEq)]
pub struct GradVector {
    pub values: Vec<f64>,
}

impl GradVector {
    pub fn zeros(len: usize) -> Self {
        GradVector {
            values: vec![0.0; len],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn param_count(hidden: usize) -> usize {
    4 * hidden + 1
}

impl InrParams {
    /// Weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]` (fan-in 2 for
    /// the input layer, `H` for the output layer), biases zero. Input
    /// weights are drawn first, then output weights, from the seed's main
    /// stream.
    pub fn init(hidden: usize, seed: u64) -> Result<Self> {
        Self::init_with(hidden, Activation::Tanh, seed)
    }

    pub fn init_with(hidden: usize, activation: Activation, seed: u64) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::invalid("hidden width must be at least 1"));
        }
        let mut rng = rng::seeded(seed);
        let mut theta = vec![0.0; param_count(hidden)];
        let in_scale = 1.0 / 2f64.sqrt();
        for w in &mut theta[..2 * hidden] {
            *w = rng.gen_range(-in_scale..=in_scale);
        }
        let out_scale = 1.0 / (hidden as f64).sqrt();
        for w in &mut theta[3 * hidden..4 * hidden] {
            *w = rng.gen_range(-out_scale..=out_scale);
        }
        Ok(InrParams {
            hidden,
            activation,
            seed,
            theta,
        })
    }

    /// Builds parameters from an explicit flat vector.
    pub fn from_flat(hidden: usize, activation: Activation, seed: u64, theta: Vec<f64>) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::invalid("hidden width must be at least 1"));
        }
        if theta.len() != param_count(hidden) {
            return Err(Error::invalid(format!(
                "expected {} parameters for H = {hidden}, got {}",
                param_count(hidden),
                theta.len()
            )));
        }
        if let Some(v) = theta.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite parameter {v}")));
        }
        Ok(InrParams {
            hidden,
            activation,
            seed,
            theta,
        })
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.theta
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    fn w_lo(&self) -> &[f64] {
        &self.theta[..self.hidden]
    }

    fn w_hi(&self) -> &[f64] {
        &self.theta[self.hidden..2 * self.hidden]
    }

    fn b_in(&self) -> &[f64] {
        &self.theta[2 * self.hidden..3 * self.hidden]
    }

    fn w_out(&self) -> &[f64] {
        &self.theta[3 * self.hidden..4 * self.hidden]
    }

    fn b_out(&self) -> f64 {
        self.theta[4 * self.hidden]
    }

    /// Network output for `(x, y)` in the unit square.
    pub fn forward(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain { x, y });
        }
        Ok(if x <= y {
            self.forward_canonical(x, y)
        } else {
            self.forward_canonical(y, x)
        })
    }

    /// Output for an already-ordered pair `lo <= hi`.
    #[inline]
    pub fn forward_canonical(&self, lo: f64, hi: f64) -> f64 {
        let (w_lo, w_hi, b_in, w_out) = (self.w_lo(), self.w_hi(), self.b_in(), self.w_out());
        let mut o = self.b_out();
        for h in 0..self.hidden {
            let z = w_lo[h] * lo + w_hi[h] * hi + b_in[h];
            o += w_out[h] * self.activation.apply(z);
        }
        sigmoid(o)
    }

    /// Forward pass that also records, per hidden unit, the activation and
    /// `w_out[h] * act'(z_h)` (the output's sensitivity to `z_h` before the
    /// sigmoid). Returns the output.
    #[inline]
    fn forward_traced(&self, lo: f64, hi: f64, acts: &mut [f64], sens: &mut [f64]) -> f64 {
        let (w_lo, w_hi, b_in, w_out) = (self.w_lo(), self.w_hi(), self.b_in(), self.w_out());
        let act = self.activation;
        let mut o = self.b_out();
        for h in 0..self.hidden {
            let z = w_lo[h] * lo + w_hi[h] * hi + b_in[h];
            let (a, da) = act.with_derivative(z);
            acts[h] = a;
            sens[h] = w_out[h] * da;
            o += w_out[h] * a;
        }
        sigmoid(o)
    }

    /// Model file text: header (magic, version, H, activation, seed,
    /// parameter count) then one parameter per line in flat order.
    pub fn to_model_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_MAGIC}");
        let _ = writeln!(out, "version {MODEL_VERSION}");
        let _ = writeln!(out, "hidden {}", self.hidden);
        let _ = writeln!(out, "activation {}", self.activation.as_str());
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "params {}", self.theta.len());
        for v in &self.theta {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    pub fn from_model_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse_err = |line: usize, message: String| Error::Parse { line: line + 1, message };
        match lines.next() {
            Some((_, l)) if l.trim() == MODEL_MAGIC => {}
            Some((i, l)) => return Err(parse_err(i, format!("expected `{MODEL_MAGIC}`, got `{l}`"))),
            None => return Err(parse_err(0, "empty model file".into())),
        }
        let mut field = |name: &str| -> Result<String> {
            let (i, l) = lines
                .next()
                .ok_or_else(|| parse_err(0, format!("missing `{name}` header")))?;
            match l.trim().split_once(' ') {
                Some((key, value)) if key == name => Ok(value.trim().to_string()),
                _ => Err(parse_err(i, format!("expected `{name} <value>`, got `{l}`"))),
            }
        };
        let version: u32 = field("version")?
            .parse()
            .map_err(|_| Error::invalid("bad model version"))?;
        if version != MODEL_VERSION {
            return Err(Error::invalid(format!("unsupported model version {version}")));
        }
        let hidden: usize = field("hidden")?
            .parse()
            .map_err(|_| Error::invalid("bad hidden width"))?;
        let activation: Activation = field("activation")?.parse()?;
        let seed: u64 = field("seed")?.parse().map_err(|_| Error::invalid("bad seed"))?;
        let count: usize = field("params")?
            .parse()
            .map_err(|_| Error::invalid("bad parameter count"))?;
        let theta = lines
            .map(|(i, l)| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(i, format!("`{}` is not a number", l.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        if theta.len() != count {
            return Err(Error::invalid(format!(
                "header announces {count} parameters, file holds {}",
                theta.len()
            )));
        }
        Self::from_flat(hidden, activation, seed, theta)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_model_text(&text).map_err(|e| Error::in_file(path, e))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_model_text()).map_err(|e| Error::io(path, e))
    }
}

/// Four i.i.d. uniform latent coordinates. Motif `F` on `k` vertices uses the
/// first `k` of them.
pub type Tuple = [f64; 4];

pub fn draw_tuples(count: usize, rng: &mut StreamRng) -> Vec<Tuple> {
    (0..count)
        .map(|_| [rng.gen(), rng.gen(), rng.gen(), rng.gen()])
        .collect()
}

/// Per-motif `(pair mask, edge mask)` over [`PAIRS`].
fn motif_masks() -> [(u8, u8); NUM_MOTIFS] {
    MOTIFS.map(|m| (m.pair_mask(), m.edge_mask()))
}

#[inline]
fn canonical(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Induced-pattern probabilities of every motif for one tuple, given the six
/// pair values.
#[inline]
fn motif_products(f: &[f64; 6], masks: &[(u8, u8); NUM_MOTIFS]) -> [f64; NUM_MOTIFS] {
    let mut out = [0.0; NUM_MOTIFS];
    for (slot, &(pairs, edges)) in out.iter_mut().zip(masks) {
        let mut prod = 1.0;
        for (p, &fp) in f.iter().enumerate() {
            if pairs & (1 << p) != 0 {
                prod *= if edges & (1 << p) != 0 { fp } else { 1.0 - fp };
            }
        }
        *slot = prod;
    }
    out
}

/// Per-motif sums of pattern probabilities of `eval` over the tuples.
fn motif_sums<E>(eval: &E, tuples: &[Tuple]) -> [f64; NUM_MOTIFS]
where
    E: Fn(f64, f64) -> f64 + Sync,
{
    let masks = motif_masks();
    let parts: Vec<[f64; NUM_MOTIFS]> = tuples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut sums = [0.0; NUM_MOTIFS];
            for t in chunk {
                let mut f = [0.0; 6];
                for (slot, &(a, b)) in f.iter_mut().zip(&PAIRS) {
                    let (lo, hi) = canonical(t[a], t[b]);
                    *slot = eval(lo, hi);
                }
                for (s, p) in sums.iter_mut().zip(motif_products(&f, &masks)) {
                    *s += p;
                }
            }
            sums
        })
        .collect();
    let mut sums = [0.0; NUM_MOTIFS];
    for part in parts {
        for (s, p) in sums.iter_mut().zip(part) {
            *s += p;
        }
    }
    sums
}

/// Monte-Carlo induced densities of the kernel `eval` (called on canonical
/// pairs) over the given tuples.
pub fn mc_moments_with<E>(eval: E, tuples: &[Tuple]) -> MomentVector
where
    E: Fn(f64, f64) -> f64 + Sync,
{
    assert!(!tuples.is_empty(), "Monte-Carlo estimate needs at least one tuple");
    let sums = motif_sums(&eval, tuples);
    let l = tuples.len() as f64;
    MomentVector {
        values: sums.map(|s| (s / l).clamp(0.0, 1.0)),
        provenance: Provenance::Model {
            samples: tuples.len(),
        },
    }
}

/// Result of one loss evaluation.
#[derive(Clone, Debug)]
pub struct LossEval {
    pub loss: f64,
    pub grad: GradVector,
    pub mhat: MomentVector,
}

/// Weighted squared moment error `sum_F w_F (m_F - mhat_F)^2`.
pub fn weighted_loss(target: &MomentVector, mhat: &MomentVector, weights: &[f64; NUM_MOTIFS]) -> f64 {
    (0..NUM_MOTIFS)
        .map(|i| weights[i] * (target[i] - mhat[i]).powi(2))
        .sum()
}

/// Per-chunk accumulators: motif probability sums and, for every motif, the
/// Jacobian of its sum with respect to the flat parameter vector.
struct ChunkJacobian {
    sums: [f64; NUM_MOTIFS],
    jac: Vec<f64>,
}

/// Monte-Carlo moments of the network, the weighted loss against `target`
/// and its exact gradient.
///
/// All nine motifs share the six pair evaluations of each tuple. The
/// derivative of a pattern probability with respect to one pair value is the
/// product of the other factors, negated for non-edge factors. Because the
/// loss weights depend on the batch mean, each chunk accumulates the
/// Jacobian of every motif's probability sum in one forward sweep; the
/// gradient is their weighted combination.
pub fn loss_and_grad(
    params: &InrParams,
    tuples: &[Tuple],
    target: &MomentVector,
    weights: &[f64; NUM_MOTIFS],
) -> LossEval {
    assert!(!tuples.is_empty(), "loss needs at least one tuple");
    let masks = motif_masks();
    let h_n = params.hidden;
    let n_params = params.len();

    let parts: Vec<ChunkJacobian> = tuples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = ChunkJacobian {
                sums: [0.0; NUM_MOTIFS],
                jac: vec![0.0; NUM_MOTIFS * n_params],
            };
            let mut acts = vec![0.0; 6 * h_n];
            let mut sens = vec![0.0; 6 * h_n];
            for t in chunk {
                let mut f = [0.0f64; 6];
                let mut slope = [0.0f64; 6];
                let mut coords = [(0.0f64, 0.0f64); 6];
                for (p, &(a, b)) in PAIRS.iter().enumerate() {
                    let (lo, hi) = canonical(t[a], t[b]);
                    coords[p] = (lo, hi);
                    let out = params.forward_traced(
                        lo,
                        hi,
                        &mut acts[p * h_n..(p + 1) * h_n],
                        &mut sens[p * h_n..(p + 1) * h_n],
                    );
                    f[p] = out;
                    slope[p] = out * (1.0 - out);
                }
                for (m, &(pairs, edges)) in masks.iter().enumerate() {
                    let factor = |q: usize| if edges & (1 << q) != 0 { f[q] } else { 1.0 - f[q] };
                    let mut prod = 1.0;
                    for q in 0..6 {
                        if pairs & (1 << q) != 0 {
                            prod *= factor(q);
                        }
                    }
                    acc.sums[m] += prod;
                    let jac = &mut acc.jac[m * n_params..(m + 1) * n_params];
                    for p in 0..6 {
                        if pairs & (1 << p) == 0 {
                            continue;
                        }
                        let mut others = 1.0;
                        for q in 0..6 {
                            if q != p && pairs & (1 << q) != 0 {
                                others *= factor(q);
                            }
                        }
                        let sign = if edges & (1 << p) != 0 { 1.0 } else { -1.0 };
                        let c = sign * others * slope[p];
                        if c != 0.0 {
                            let (lo, hi) = coords[p];
                            accumulate_pair(
                                jac,
                                h_n,
                                c,
                                lo,
                                hi,
                                &acts[p * h_n..(p + 1) * h_n],
                                &sens[p * h_n..(p + 1) * h_n],
                            );
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut sums = [0.0; NUM_MOTIFS];
    let mut jac = vec![0.0; NUM_MOTIFS * n_params];
    for part in parts {
        for (s, x) in sums.iter_mut().zip(part.sums) {
            *s += x;
        }
        for (j, x) in jac.iter_mut().zip(&part.jac) {
            *j += x;
        }
    }

    let l = tuples.len() as f64;
    let mhat_values = sums.map(|s| s / l);
    let loss: f64 = (0..NUM_MOTIFS)
        .map(|i| weights[i] * (target[i] - mhat_values[i]).powi(2))
        .sum();
    let mut grad = GradVector::zeros(n_params);
    for m in 0..NUM_MOTIFS {
        // dL/d(sum_F) with the 1/L of the mean folded in.
        let g = -2.0 * weights[m] * (target[m] - mhat_values[m]) / l;
        if g == 0.0 {
            continue;
        }
        for (out, j) in grad.values.iter_mut().zip(&jac[m * n_params..(m + 1) * n_params]) {
            *out += g * j;
        }
    }
    let mhat = MomentVector {
        values: mhat_values.map(|v| v.clamp(0.0, 1.0)),
        provenance: Provenance::Model {
            samples: tuples.len(),
        },
    };
    LossEval { loss, grad, mhat }
}

/// Adds `c * d f(lo, hi) / d theta` to a Jacobian row, where `c` already
/// includes the sigmoid slope.
#[inline]
fn accumulate_pair(jac: &mut [f64], h_n: usize, c: f64, lo: f64, hi: f64, acts: &[f64], sens: &[f64]) {
    let (j_lo, rest) = jac.split_at_mut(h_n);
    let (j_hi, rest) = rest.split_at_mut(h_n);
    let (j_b, rest) = rest.split_at_mut(h_n);
    let (j_out, j_bout) = rest.split_at_mut(h_n);
    j_bout[0] += c;
    for h in 0..h_n {
        let dz = c * sens[h];
        j_lo[h] += dz * lo;
        j_hi[h] += dz * hi;
        j_b[h] += dz;
        j_out[h] += c * acts[h];
    }
}
