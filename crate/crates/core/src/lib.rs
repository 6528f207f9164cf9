//! Graphon estimation by induced-motif moment matching.
//!
//! Pipeline: sample or load graphs ([`graph`]), count induced motifs and
//! average their densities ([`motif`]), then fit a small coordinate network
//! whose Monte-Carlo motif densities match the empirical ones
//! ([`inr`], [`trainer`]). [`mixup`] builds augmented datasets by mixing
//! class moment vectors, and [`eval`] holds metrics, graphon centralities
//! and the concentration / cut-distance bound calculators.

pub mod error;
pub mod eval;
pub mod graph;
pub mod graphon;
pub mod inr;
pub mod mixup;
pub mod motif;
pub mod rng;
pub mod trainer;

pub use error::{Error, Result};
pub use graph::{parse_edge_list, sample_graph, write_edge_list, Graph, SampledGraph};
pub use graphon::{discretize, parse_graphon_spec, Graphon, GraphonKind, Grid};
pub use inr::{Activation, GradVector, InrParams};
pub use motif::{
    average_moments, brute_force_counts, census, count_induced, densities_from_counts, graph_moments, Census,
    CensusFile, MomentVector, Motif, Provenance, MOTIFS, NUM_MOTIFS,
};
pub use mixup::{augment, mix_moments, AugmentedSample, MixupConfig, MixupOutcome};
pub use trainer::{estimate_moments, train, weights_from_moments, StopReason, TrainConfig, TrainReport};
