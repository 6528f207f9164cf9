//! Shared fixtures for the benchmarks.

use momentnet::rng::derive_seed;
use momentnet::{sample_graph, Graph, Graphon};

/// Sparse graph from the constant graphon with expected degree `degree`.
pub fn sparse_graph(n: usize, degree: f64, seed: u64) -> Graph {
    let p = (degree / (n - 1) as f64).min(1.0);
    sample_graph(&Graphon::constant(p).expect("valid probability"), n, seed).graph
}

/// `count` graphs of `n` nodes from analytic graphon `id`.
pub fn dense_dataset(id: u8, n: usize, count: usize, seed: u64) -> Vec<Graph> {
    let w = Graphon::analytic(id).expect("known graphon");
    (0..count)
        .map(|i| sample_graph(&w, n, derive_seed(seed, i as u64)).graph)
        .collect()
}
