//! Deterministic motif densities of a graphon by Gauss-Legendre quadrature.
//!
//! A motif density is an integral over `[0,1]^k` of a product of kernel
//! values. Graphons here are only smooth away from the diagonals
//! (`value(x, y)` is computed at `(min, max)`), so the cube is split into
//! its `k!` ordered simplices. By symmetry every simplex contributes the
//! same integral of the pattern averaged over vertex relabelings, so one
//! simplex `0 < x_1 < ... < x_k < 1` is integrated with the collapsed map
//! `x_k = t_k, x_i = x_{i+1} t_i`, whose Jacobian is `x_2 x_3 ... x_k`.

use crate::error::{Error, Result};
use crate::graphon::{Graphon, GraphonKind};
use crate::motif::{MomentVector, Motif, Provenance, MOTIFS, NUM_MOTIFS};

/// Nodes and weights of the `m`-point Gauss-Legendre rule on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "need at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Newton iteration on P_m from the Chebyshev-like initial guess.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..m {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = m as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        // Map from [-1, 1] to [0, 1].
        nodes[i] = 0.5 * (1.0 - z);
        nodes[m - 1 - i] = 0.5 * (1.0 + z);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for slot in 0..k {
            let mut q = p.clone();
            q.insert(slot, k - 1);
            out.push(q);
        }
    }
    out
}

fn pair_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    // Row-major upper triangle of a 4x4 table, matching `motif::PAIRS`.
    [[0, 0, 1, 2], [0, 0, 3, 4], [0, 0, 0, 5]][a][b]
}

/// Induced density of `motif` in `w` with `nodes` points per dimension.
pub fn induced_density(w: &Graphon, motif: &Motif, nodes: usize) -> f64 {
    if let GraphonKind::Constant(p) = w.kind() {
        return motif.constant_density(*p);
    }
    let k = motif.k;
    let (t, wt) = gauss_legendre(nodes);
    let perms = permutations(k);
    let mut total = 0.0;
    let mut idx = vec![0usize; k];
    let mut x = vec![0.0; k];
    let mut kv = [0.0; 6];
    loop {
        x[k - 1] = t[idx[k - 1]];
        let mut weight = wt[idx[k - 1]];
        for i in (0..k - 1).rev() {
            weight *= wt[idx[i]] * x[i + 1];
            x[i] = x[i + 1] * t[idx[i]];
        }
        for a in 0..k {
            for b in a + 1..k {
                kv[pair_index(a, b)] = w.value(x[a], x[b]);
            }
        }
        let mut sym = 0.0;
        for p in &perms {
            let mut prod = 1.0;
            for a in 0..k {
                for b in a + 1..k {
                    let v = kv[pair_index(p[a], p[b])];
                    prod *= if motif.edges.contains(&(a, b)) { v } else { 1.0 - v };
                }
            }
            sym += prod;
        }
        // k! simplices, each carrying the relabeling average.
        total += weight * sym;

        let mut d = 0;
        loop {
            if d == k {
                return total;
            }
            idx[d] += 1;
            if idx[d] < nodes {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// All nine induced densities of `w` by quadrature.
pub fn exact_moments(w: &Graphon, nodes: usize) -> Result<MomentVector> {
    if nodes == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    let mut values = [0.0; NUM_MOTIFS];
    for (v, m) in values.iter_mut().zip(MOTIFS.iter()) {
        *v = induced_density(w, m, nodes).clamp(0.0, 1.0);
    }
    MomentVector::new(values, Provenance::Exact)
}
