//! Induced-motif census over the nine connected motifs on two to four
//! vertices, and conversion of counts into densities.
//!
//! A density is `count / (C(n, k) * c_F)` where `c_F = k! / |Aut(F)|` is the
//! number of labeled copies of `F` on `k` fixed vertices. This equals the
//! fraction of injective maps `[k] -> V(G)` that induce exactly the labeled
//! pattern stored in [`Motif::edges`], the finite counterpart of the induced
//! density `t'(F, W)` estimated by the coordinate network.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const NUM_MOTIFS: usize = 9;

/// Vertex pairs of a 4-tuple, in the fixed order used for pair bitmasks.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Motif {
    pub name: &'static str,
    pub k: usize,
    /// Labeled representative on vertices `0..k`.
    pub edges: &'static [(usize, usize)],
    pub automorphisms: u64,
}

impl Motif {
    /// `k! / |Aut(F)|`.
    pub const fn labeled_copies(&self) -> u64 {
        let fact = match self.k {
            2 => 2,
            3 => 6,
            _ => 24,
        };
        fact / self.automorphisms
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of vertex pairs among the motif's `k` vertices.
    pub fn num_pairs(&self) -> usize {
        self.k * (self.k - 1) / 2
    }

    /// Bitmask over [`PAIRS`] of the pairs that lie inside the motif's vertex set.
    pub fn pair_mask(&self) -> u8 {
        PAIRS
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a < self.k && b < self.k)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// Bitmask over [`PAIRS`] of the pattern's edges.
    pub fn edge_mask(&self) -> u8 {
        self.edges.iter().fold(0, |m, &(a, b)| {
            let (a, b) = (a.min(b), a.max(b));
            let idx = PAIRS.iter().position(|&p| p == (a, b)).expect("edge within 4 vertices");
            m | (1 << idx)
        })
    }

    /// Induced density of the motif in the constant graphon `p`:
    /// `p^|E| (1 - p)^(C(k,2) - |E|)`.
    pub fn constant_density(&self, p: f64) -> f64 {
        let e = self.num_edges() as i32;
        let miss = self.num_pairs() as i32 - e;
        p.powi(e) * (1.0 - p).powi(miss)
    }
}

/// Motif catalog in fixed order: edge, P3, triangle, P4, star, C4, paw,
/// diamond, K4.
pub const MOTIFS: [Motif; NUM_MOTIFS] = [
    Motif { name: "edge", k: 2, edges: &[(0, 1)], automorphisms: 2 },
    Motif { name: "path3", k: 3, edges: &[(0, 1), (1, 2)], automorphisms: 2 },
    Motif { name: "triangle", k: 3, edges: &[(0, 1), (0, 2), (1, 2)], automorphisms: 6 },
    Motif { name: "path4", k: 4, edges: &[(0, 1), (1, 2), (2, 3)], automorphisms: 2 },
    Motif { name: "star", k: 4, edges: &[(0, 1), (0, 2), (0, 3)], automorphisms: 6 },
    Motif { name: "cycle4", k: 4, edges: &[(0, 1), (1, 2), (2, 3), (0, 3)], automorphisms: 8 },
    Motif { name: "paw", k: 4, edges: &[(0, 1), (0, 2), (1, 2), (0, 3)], automorphisms: 2 },
    Motif { name: "diamond", k: 4, edges: &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)], automorphisms: 4 },
    Motif {
        name: "clique4",
        k: 4,
        edges: &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        automorphisms: 24,
    },
];

/// Catalog labels `F0`..`F8`.
pub fn motif_labels() -> Vec<String> {
    (0..NUM_MOTIFS).map(|i| format!("F{i}")).collect()
}

/// Number of unlabeled induced copies of each catalog motif.
pub type MotifCounts = [u64; NUM_MOTIFS];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Census average over `graphs` observed graphs.
    Empirical { graphs: usize },
    /// Monte-Carlo estimate from `samples` coordinate tuples.
    Model { samples: usize },
    /// Convex combination with weight `alpha` on the first input.
    Mixed { alpha: f64 },
    /// Closed form or deterministic quadrature.
    Exact,
}

/// Induced-motif densities in catalog order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub values: [f64; NUM_MOTIFS],
    pub provenance: Provenance,
}

impl MomentVector {
    pub fn new(values: [f64; NUM_MOTIFS], provenance: Provenance) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("density F{i} = {v} outside [0, 1]")));
        }
        Ok(MomentVector { values, provenance })
    }

    /// Closed-form moments of the constant graphon `p`.
    pub fn constant(p: f64) -> Self {
        MomentVector {
            values: MOTIFS.map(|m| m.constant_density(p)),
            provenance: Provenance::Exact,
        }
    }

    pub fn edge_density(&self) -> f64 {
        self.values[0]
    }
}

impl std::ops::Index<usize> for MomentVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

/// Exact induced counts by edge iteration.
///
/// Triangles, diamonds and paws come from per-edge common neighborhoods,
/// stars and wedges from degree combinatorics, 4-cycles from pair
/// co-degrees, and 4-cliques from a degree-ordered orientation. Those give
/// non-induced (subgraph) counts; the induced counts follow by subtracting
/// the copies of each pattern contained in its denser supergraphs.
pub fn count_induced(g: &Graph) -> MotifCounts {
    let n = g.n();
    let deg: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();

    let mut tri_at = vec![0u64; n];
    let mut tri_edge_sum = 0u64;
    let mut diamond_sub = 0u64;
    let mut p4_sub = 0u64;
    for (u, v) in g.edges() {
        let t = intersection_size(g.neighbors(u), g.neighbors(v)) as u64;
        tri_edge_sum += t;
        tri_at[u] += t;
        tri_at[v] += t;
        diamond_sub += t * t.saturating_sub(1) / 2;
        p4_sub += (deg[u] - 1) * (deg[v] - 1);
    }
    let triangles = tri_edge_sum / 3;
    p4_sub -= 3 * triangles;

    let mut wedges = 0u64;
    let mut star_sub = 0u64;
    let mut paw_sub = 0u64;
    for v in 0..n {
        let d = deg[v];
        wedges += d * d.saturating_sub(1) / 2;
        star_sub += d * d.saturating_sub(1) * d.saturating_sub(2) / 6;
        // Each triangle at v is seen from both of its edges incident to v.
        paw_sub += (tri_at[v] / 2) * d.saturating_sub(2);
    }

    let c4_sub = four_cycles(g);
    let k4 = four_cliques(g);

    let m = g.num_edges() as u64;
    let i = |x: u64| x as i128;
    let k4_i = i(k4);
    let diamond = i(diamond_sub) - 6 * k4_i;
    let c4 = i(c4_sub) - diamond - 3 * k4_i;
    let paw = i(paw_sub) - 4 * diamond - 12 * k4_i;
    let star = i(star_sub) - paw - 2 * diamond - 4 * k4_i;
    let p4 = i(p4_sub) - 2 * paw - 4 * c4 - 6 * diamond - 12 * k4_i;
    let p3 = i(wedges) - 3 * i(triangles);

    let out = [i(m), p3, i(triangles), p4, star, c4, paw, diamond, k4_i];
    out.map(|x| {
        assert!(x >= 0, "negative induced count: inclusion-exclusion out of sync");
        x as u64
    })
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn intersect_into(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

/// Non-induced 4-cycles: half the sum of `C(codeg(u, w), 2)` over pairs `u < w`.
fn four_cycles(g: &Graph) -> u64 {
    let n = g.n();
    let mut codeg = vec![0u32; n];
    let mut touched = Vec::new();
    let mut total = 0u64;
    for u in 0..n {
        for &v in g.neighbors(u) {
            for &w in g.neighbors(v as usize) {
                let w = w as usize;
                if w > u {
                    if codeg[w] == 0 {
                        touched.push(w);
                    }
                    codeg[w] += 1;
                }
            }
        }
        for &w in &touched {
            let c = codeg[w] as u64;
            total += c * (c - 1) / 2;
            codeg[w] = 0;
        }
        touched.clear();
    }
    total / 2
}

/// 4-cliques, each found once from its lowest-ranked vertex under the
/// (degree, index) order.
fn four_cliques(g: &Graph) -> u64 {
    let n = g.n();
    let rank_key = |v: usize| (g.degree(v), v);
    let out: Vec<Vec<u32>> = (0..n)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| rank_key(v as usize) > rank_key(u))
                .collect()
        })
        .collect();
    let mut common = Vec::new();
    let mut total = 0u64;
    for u in 0..n {
        for &v in &out[u] {
            intersect_into(&out[u], &out[v as usize], &mut common);
            for &w in &common {
                total += intersection_size(&common, &out[w as usize]) as u64;
            }
        }
    }
    total
}

/// Catalog index of a connected induced pattern given its vertex count,
/// edge count and sorted degree sequence.
fn classify(k: usize, num_edges: usize, degrees: &[usize]) -> Option<usize> {
    match (k, num_edges) {
        (2, 1) => Some(0),
        (3, 2) => Some(1),
        (3, 3) => Some(2),
        (4, 3) => match degrees {
            [1, 1, 2, 2] => Some(3),
            [1, 1, 1, 3] => Some(4),
            _ => None,
        },
        (4, 4) => match degrees {
            [2, 2, 2, 2] => Some(5),
            [1, 2, 2, 3] => Some(6),
            _ => None,
        },
        (4, 5) => Some(7),
        (4, 6) => Some(8),
        _ => None,
    }
}

/// Largest graph accepted by [`brute_force_counts`].
pub const BRUTE_FORCE_MAX_N: usize = 30;

/// Reference counter: enumerates every 2-, 3- and 4-subset and classifies its
/// induced subgraph by edge count and degree sequence.
pub fn brute_force_counts(g: &Graph) -> Result<MotifCounts> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::invalid(format!(
            "brute-force census refused for n = {n} > {BRUTE_FORCE_MAX_N}"
        )));
    }
    let mut counts = [0u64; NUM_MOTIFS];
    let mut tally = |vs: &[usize]| {
        let k = vs.len();
        let mut degrees = vec![0usize; k];
        let mut edges = 0;
        for a in 0..k {
            for b in (a + 1)..k {
                if g.has_edge(vs[a], vs[b]) {
                    degrees[a] += 1;
                    degrees[b] += 1;
                    edges += 1;
                }
            }
        }
        degrees.sort_unstable();
        if let Some(idx) = classify(k, edges, &degrees) {
            counts[idx] += 1;
        }
    };
    for a in 0..n {
        for b in (a + 1)..n {
            tally(&[a, b]);
            for c in (b + 1)..n {
                tally(&[a, b, c]);
                for d in (c + 1)..n {
                    tally(&[a, b, c, d]);
                }
            }
        }
    }
    Ok(counts)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Normalizes raw induced counts of an `n`-vertex graph into densities.
pub fn densities_from_counts(counts: &MotifCounts, n: usize) -> Result<MomentVector> {
    if n < 4 {
        return Err(Error::invalid(format!(
            "census needs at least 4 vertices, graph has {n}"
        )));
    }
    let mut values = [0.0; NUM_MOTIFS];
    for (idx, motif) in MOTIFS.iter().enumerate() {
        let capacity = binomial(n as u64, motif.k as u64) * motif.labeled_copies() as u128;
        if counts[idx] as u128 > capacity {
            return Err(Error::Consistency(format!(
                "{} count {} exceeds the {capacity} possible copies in {n} vertices",
                motif.name, counts[idx]
            )));
        }
        values[idx] = counts[idx] as f64 / capacity as f64;
    }
    Ok(MomentVector {
        values,
        provenance: Provenance::Empirical { graphs: 1 },
    })
}

/// Induced densities of a single graph.
pub fn graph_moments(g: &Graph) -> Result<MomentVector> {
    if g.n() < 4 {
        return Err(Error::invalid(format!(
            "census needs at least 4 vertices, graph has {}",
            g.n()
        )));
    }
    densities_from_counts(&count_induced(g), g.n())
}

/// Elementwise mean of moment vectors.
pub fn average_moments(vectors: &[MomentVector]) -> Result<MomentVector> {
    if vectors.is_empty() {
        return Err(Error::invalid("cannot average an empty list of moment vectors"));
    }
    let mut values = [0.0; NUM_MOTIFS];
    for v in vectors {
        for (acc, x) in values.iter_mut().zip(v.values) {
            *acc += x;
        }
    }
    let p = vectors.len() as f64;
    for acc in &mut values {
        *acc = (*acc / p).clamp(0.0, 1.0);
    }
    Ok(MomentVector {
        values,
        provenance: Provenance::Empirical {
            graphs: vectors.len(),
        },
    })
}

/// Per-graph densities and their dataset average.
#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub per_graph: Vec<MomentVector>,
    pub average: MomentVector,
}

/// Counts every graph in parallel (one task per graph) and averages in input
/// order, so the result does not depend on the worker count.
pub fn census(graphs: &[Graph]) -> Result<Census> {
    let per_graph = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| graph_moments(g).map_err(|e| Error::invalid(format!("graph #{i}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let average = average_moments(&per_graph)?;
    Ok(Census { per_graph, average })
}

/// On-disk census layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusFile {
    pub motifs: Vec<String>,
    pub per_graph: Vec<[f64; NUM_MOTIFS]>,
    pub average: [f64; NUM_MOTIFS],
    pub num_graphs: usize,
}

impl From<&Census> for CensusFile {
    fn from(c: &Census) -> Self {
        CensusFile {
            motifs: motif_labels(),
            per_graph: c.per_graph.iter().map(|m| m.values).collect(),
            average: c.average.values,
            num_graphs: c.per_graph.len(),
        }
    }
}

impl CensusFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("census serializes");
        s.push('\n');
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: CensusFile =
            serde_json::from_str(&text).map_err(|e| Error::in_file(path, e.into()))?;
        if file.motifs != motif_labels() {
            return Err(Error::in_file(
                path,
                Error::invalid(format!("unexpected motif list {:?}", file.motifs)),
            ));
        }
        Ok(file)
    }

    pub fn average_moments(&self) -> Result<MomentVector> {
        MomentVector::new(
            self.average,
            Provenance::Empirical {
                graphs: self.num_graphs,
            },
        )
    }
}
