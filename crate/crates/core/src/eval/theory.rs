//! Concentration and cut-distance bound calculators, plus a Monte-Carlo
//! check of the concentration bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::quadrature::induced_density;
use crate::graph::sample_graph;
use crate::graphon::Graphon;
use crate::motif::{graph_moments, MOTIFS, NUM_MOTIFS};
use crate::rng::derive_seed;

/// Number of simple graphs on `k` vertices up to isomorphism, `k = 1..=5`.
pub const NON_ISOMORPHIC_GRAPHS: [u64; 5] = [1, 2, 4, 11, 34];

/// Quadrature nodes per dimension for the reference densities.
const REFERENCE_NODES: usize = 16;

/// Value of the motif concentration bound, or the reason it does not apply.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Lemma1 {
    Bound { value: f64 },
    /// `epsilon` is below the sampling bias `k(k-1)/(2n)`.
    Inapplicable { bias: f64 },
}

impl Lemma1 {
    pub fn value(&self) -> Option<f64> {
        match self {
            Lemma1::Bound { value } => Some(*value),
            Lemma1::Inapplicable { .. } => None,
        }
    }
}

fn sampling_bias(n: usize, k: usize) -> f64 {
    (k * (k - 1)) as f64 / (2 * n) as f64
}

/// `2 exp(-(P n / (4 k^2)) (eps - k(k-1)/(2n))^2)` for `P` graphs of `n`
/// nodes and a `k`-vertex motif.
pub fn lemma1_bound(p: usize, n: usize, k: usize, eps: f64) -> Lemma1 {
    let bias = sampling_bias(n, k);
    if eps < bias {
        return Lemma1::Inapplicable { bias };
    }
    let rate = (p * n) as f64 / (4 * k * k) as f64;
    Lemma1::Bound {
        value: 2.0 * (-rate * (eps - bias).powi(2)).exp(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TheoryBound {
    pub k: usize,
    pub n_k: u64,
    /// `3^(-k^2)`.
    pub delta_m: f64,
    /// Kernel sup bound; 1 for graphons.
    pub c: f64,
    /// `22 C / sqrt(log2 k)`.
    pub eta_cut: f64,
    /// Node count that must be exceeded: `k(k-1) / delta_m`.
    pub n_threshold: f64,
    /// `N_k` times the concentration bound at `eps = delta_m / 2`.
    pub failure_probability: f64,
    pub zeta: f64,
    pub applies: bool,
    /// The cut-distance bound exceeds 1 and says nothing about graphons.
    pub vacuous: bool,
}

pub fn theorem_condition(p: usize, n: usize, k: usize, zeta: f64) -> Result<TheoryBound> {
    if !(2..=5).contains(&k) {
        return Err(Error::invalid(format!("k must lie in 2..=5, got {k}")));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::invalid(format!("zeta must lie in (0, 1), got {zeta}")));
    }
    if p == 0 || n == 0 {
        return Err(Error::invalid("P and n must be positive"));
    }
    let n_k = NON_ISOMORPHIC_GRAPHS[k - 1];
    let delta_m = 3f64.powi(-((k * k) as i32));
    let c = 1.0;
    let eta_cut = 22.0 * c / (k as f64).log2().sqrt();
    let n_threshold = (k * (k - 1)) as f64 * 3f64.powi((k * k) as i32);
    let rate = (p * n) as f64 / (4 * k * k) as f64;
    let gap = delta_m / 2.0 - sampling_bias(n, k);
    let failure_probability = n_k as f64 * 2.0 * (-rate * gap * gap).exp();
    Ok(TheoryBound {
        k,
        n_k,
        delta_m,
        c,
        eta_cut,
        n_threshold,
        failure_probability,
        zeta,
        applies: n as f64 > n_threshold && failure_probability < zeta,
        vacuous: eta_cut > 1.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Concentration {
    pub empirical_prob: f64,
    pub bound: f64,
    /// Reference density the averages are compared with.
    pub truth: f64,
    pub trials: usize,
}

/// Fraction of trials in which the average density of motif `motif` over
/// `p` sampled graphs of `n` nodes deviates from the graphon's density by at
/// least `eps`, next to the concentration bound.
pub fn simulate_concentration(
    w: &Graphon,
    motif: usize,
    p: usize,
    n: usize,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<Concentration> {
    if motif >= NUM_MOTIFS {
        return Err(Error::invalid(format!("motif index {motif} out of range")));
    }
    if trials == 0 || p == 0 {
        return Err(Error::invalid("trials and P must be positive"));
    }
    let k = MOTIFS[motif].k;
    if n < 4 {
        return Err(Error::invalid(format!("n must be at least 4, got {n}")));
    }
    let bound = match lemma1_bound(p, n, k, eps) {
        Lemma1::Bound { value } if eps > sampling_bias(n, k) => value,
        _ => {
            return Err(Error::invalid(format!(
                "eps = {eps} does not exceed the sampling bias {}",
                sampling_bias(n, k)
            )))
        }
    };
    let truth = induced_density(w, &MOTIFS[motif], REFERENCE_NODES);
    let hits = (0..trials)
        .into_par_iter()
        .map(|t| {
            let trial_seed = derive_seed(seed, t as u64);
            let mut sum = 0.0;
            for g in 0..p {
                let graph = sample_graph(w, n, derive_seed(trial_seed, g as u64)).graph;
                sum += if motif == 0 {
                    graph.edge_density()
                } else {
                    graph_moments(&graph)?[motif]
                };
            }
            Ok(((sum / p as f64) - truth).abs() >= eps)
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&h| h)
        .count();
    Ok(Concentration {
        empirical_prob: hits as f64 / trials as f64,
        bound,
        truth,
        trials,
    })
}

/// Wedge density of the constant graphon at the mixed parameter, and the
/// mixture of the two wedge densities: `(p_a^2 (1 - p_a), a p1^2 (1 - p1) +
/// (1 - a) p2^2 (1 - p2))` with `p_a = a p1 + (1 - a) p2`.
pub fn prop1_gap(p1: f64, p2: f64, alpha: f64) -> Result<(f64, f64)> {
    for (name, v) in [("p1", p1), ("p2", p2), ("alpha", alpha)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::invalid(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    let wedge = |p: f64| p * p * (1.0 - p);
    let pa = alpha * p1 + (1.0 - alpha) * p2;
    Ok((wedge(pa), alpha * wedge(p1) + (1.0 - alpha) * wedge(p2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn lemma1_examples() {
        let v = lemma1_bound(50, 200, 2, 0.2).value().unwrap();
        // 2 exp(-625 * 0.195^2) evaluated in 30-digit arithmetic.
        let oracle = 9.544_434_440_349_165_361_576_818e-11;
        assert!(((v - oracle) / oracle).abs() < 1e-13, "{v}");
        assert_eq!(lemma1_bound(50, 200, 2, 0.005), Lemma1::Bound { value: 2.0 });
        assert_eq!(lemma1_bound(50, 200, 2, 0.001), Lemma1::Inapplicable { bias: 0.005 });
    }

    #[test]
    fn theorem_k3() {
        let t = theorem_condition(100, 1000, 3, 0.05).unwrap();
        assert_eq!(t.n_k, 4);
        assert_eq!(t.delta_m, 1.0 / 19683.0);
        assert!((t.n_threshold - 118_098.0).abs() < 1e-9);
        assert!((t.eta_cut - 17.474_839_075_899_537).abs() < 1e-12);
        assert!(t.vacuous);
        assert!(!t.applies);
        assert!(theorem_condition(1, 1, 1, 0.1).is_err());
        assert!(theorem_condition(1, 1, 6, 0.1).is_err());
        assert!(theorem_condition(1, 1, 3, 1.0).is_err());
        assert_eq!(theorem_condition(1, 1, 2, 0.5).unwrap().eta_cut, 22.0);
    }

    #[test]
    fn theorem_applies_for_huge_samples() {
        let t = theorem_condition(1_000_000_000, 1_000_000, 2, 0.05).unwrap();
        assert!(t.n_threshold < 1e6);
        assert!(t.failure_probability < 0.05);
        assert!(t.applies);
    }

    /// Canonical form of a graph on `k` vertices: minimum adjacency bitmask
    /// over all relabelings.
    fn canonical(mask: u32, pairs: &[(usize, usize)], perms: &[Vec<usize>]) -> u32 {
        perms
            .iter()
            .map(|p| {
                pairs.iter().enumerate().fold(0u32, |m, (i, &(a, b))| {
                    if mask & (1 << i) == 0 {
                        return m;
                    }
                    let (x, y) = (p[a].min(p[b]), p[a].max(p[b]));
                    let j = pairs.iter().position(|&q| q == (x, y)).unwrap();
                    m | (1 << j)
                })
            })
            .min()
            .unwrap_or(mask)
    }

    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        perms(k - 1)
            .into_iter()
            .flat_map(|p| {
                (0..k).map(move |s| {
                    let mut q = p.clone();
                    q.insert(s, k - 1);
                    q
                })
            })
            .collect()
    }

    #[test]
    fn non_isomorphic_counts_by_enumeration() {
        for k in 1..=5usize {
            let pairs: Vec<(usize, usize)> =
                (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
            let ps = perms(k);
            let mut seen = std::collections::BTreeSet::new();
            for mask in 0..(1u32 << pairs.len()) {
                seen.insert(canonical(mask, &pairs, &ps));
            }
            assert_eq!(seen.len() as u64, NON_ISOMORPHIC_GRAPHS[k - 1], "k = {k}");
        }
    }

    #[test]
    fn prop1_examples() {
        let (g, m) = prop1_gap(0.2, 0.8, 0.5).unwrap();
        assert!((g - 0.125).abs() < 1e-15);
        assert!((m - 0.08).abs() < 1e-15);
        let (g, m) = prop1_gap(0.4, 0.4, 0.3).unwrap();
        assert!((g - m).abs() < 1e-15);
        let (g, m) = prop1_gap(0.3, 0.9, 1.0).unwrap();
        assert!((g - 0.063).abs() < 1e-15 && (m - 0.063).abs() < 1e-15);
        assert!(prop1_gap(1.2, 0.5, 0.5).is_err());
    }

    #[test]
    fn deterministic_graphs_never_deviate() {
        let w = Graphon::constant(1.0).unwrap();
        let c = simulate_concentration(&w, 2, 3, 20, 0.5, 5, 1).unwrap();
        assert_eq!(c.empirical_prob, 0.0);
        assert_eq!(c.truth, 1.0);
    }

    #[test]
    fn concentration_preconditions() {
        let w = Graphon::constant(0.5).unwrap();
        assert!(simulate_concentration(&w, 9, 1, 10, 0.5, 1, 0).is_err());
        assert!(simulate_concentration(&w, 0, 1, 10, 0.5, 0, 0).is_err());
        assert!(simulate_concentration(&w, 0, 1, 10, 0.05, 1, 0).is_err());
    }

    #[test]
    fn loose_epsilon_sees_deviations() {
        // Tiny samples with a threshold just above the bias: deviations are
        // common and the bound is vacuous.
        let w = Graphon::constant(0.5).unwrap();
        let c = simulate_concentration(&w, 0, 1, 20, 0.06, 400, 3).unwrap();
        assert!(c.empirical_prob > 0.03, "{}", c.empirical_prob);
        assert!(c.bound > 1.0);
    }

    proptest! {
        // p^2 (1 - p) is concave above 1/3 and convex below it, so on each
        // side the two values are ordered strictly.
        #[test]
        fn prop1_gap_is_strict_on_concave_side(
            p1 in 0.34f64..0.99, p2 in 0.34f64..0.99, alpha in 0.01f64..0.99
        ) {
            prop_assume!((p1 - p2).abs() > 0.05);
            let (g, m) = prop1_gap(p1, p2, alpha).unwrap();
            prop_assert!(g > m);
        }

        #[test]
        fn prop1_gap_is_strict_on_convex_side(
            p1 in 0.01f64..0.33, p2 in 0.01f64..0.33, alpha in 0.01f64..0.99
        ) {
            prop_assume!((p1 - p2).abs() > 0.05);
            let (g, m) = prop1_gap(p1, p2, alpha).unwrap();
            prop_assert!(g < m);
        }

        #[test]
        fn lemma1_is_monotone_in_sample_size(p in 1usize..100, n in 10usize..500, eps in 0.2f64..0.9) {
            let a = lemma1_bound(p, n, 3, eps).value().unwrap();
            let b = lemma1_bound(p + 1, n, 3, eps).value().unwrap();
            prop_assert!(b <= a);
        }
    }
}
