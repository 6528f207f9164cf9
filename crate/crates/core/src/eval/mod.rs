//! Evaluation: moment and grid distances, graphon centralities,
//! deterministic motif densities, and the concentration and cut-distance
//! bound calculators.

pub mod centrality;
pub mod metrics;
pub mod quadrature;
pub mod report;
pub mod theory;

pub use centrality::{analytic_centrality, numeric_centrality, CentralityProfile, Measure};
pub use metrics::{aligned_mse, moment_distance, sorted_max_deviation, MomentDistance};
pub use quadrature::{exact_moments, gauss_legendre, induced_density};
pub use theory::{lemma1_bound, prop1_gap, simulate_concentration, theorem_condition, Lemma1, TheoryBound};
pub use report::Report;

use crate::error::{Error, Result};
use crate::graphon::{Graphon, GraphonKind};
use crate::inr::{draw_tuples, mc_moments_with};
use crate::motif::MomentVector;
use crate::rng;

/// Monte-Carlo induced densities of any graphon from `samples` tuples drawn
/// from the main stream of `seed`.
pub fn monte_carlo_moments(w: &Graphon, samples: usize, seed: u64) -> Result<MomentVector> {
    if samples == 0 {
        return Err(Error::invalid("Monte-Carlo sample count must be at least 1"));
    }
    let tuples = draw_tuples(samples, &mut rng::seeded(seed));
    Ok(match w.kind() {
        GraphonKind::Model(p) => mc_moments_with(|lo, hi| p.forward_canonical(lo, hi), &tuples),
        _ => mc_moments_with(|lo, hi| w.value(lo, hi), &tuples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inr::InrParams;
    use crate::trainer::estimate_moments;

    #[test]
    fn model_estimates_agree_with_trainer_helper() {
        let p = InrParams::init(6, 4).unwrap();
        let a = monte_carlo_moments(&Graphon::model(p.clone()), 3000, 9).unwrap();
        let b = estimate_moments(&p, 3000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn estimates_track_quadrature() {
        let w = Graphon::analytic(4).unwrap();
        let mc = monte_carlo_moments(&w, 40_000, 2).unwrap();
        let exact = exact_moments(&w, 10).unwrap();
        for i in 0..crate::motif::NUM_MOTIFS {
            assert!((mc[i] - exact[i]).abs() < 0.01, "F{i}: {} vs {}", mc[i], exact[i]);
        }
    }
}
