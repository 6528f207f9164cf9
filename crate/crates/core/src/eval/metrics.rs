use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon::Grid;
use crate::motif::{MomentVector, NUM_MOTIFS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentDistance {
    pub l2: f64,
    pub linf: f64,
}

pub fn moment_distance(a: &MomentVector, b: &MomentVector) -> MomentDistance {
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for i in 0..NUM_MOTIFS {
        let d = (a[i] - b[i]).abs();
        l2 += d * d;
        linf = linf.max(d);
    }
    MomentDistance { l2: l2.sqrt(), linf }
}

/// Indices sorted by ascending row mean; ties keep index order.
pub fn degree_order(g: &Grid) -> Vec<usize> {
    let means = g.row_means();
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| means[a].total_cmp(&means[b]));
    order
}

/// Mean squared difference after reordering both grids by their degree
/// functions.
pub fn aligned_mse(a: &Grid, b: &Grid) -> Result<f64> {
    if a.resolution() != b.resolution() {
        return Err(Error::invalid(format!(
            "grid resolutions differ: {} vs {}",
            a.resolution(),
            b.resolution()
        )));
    }
    let pa = a.permuted(&degree_order(a));
    let pb = b.permuted(&degree_order(b));
    let sum: f64 = pa
        .values()
        .iter()
        .zip(pb.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / pa.values().len() as f64)
}

/// Largest absolute difference between the sorted entries of two profiles
/// of equal length. Used when one of them may be a reflected copy.
pub fn sorted_max_deviation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("profile lengths differ: {} vs {}", a.len(), b.len())));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

pub fn max_abs_deviation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!("profile lengths differ: {} vs {}", a.len(), b.len())));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
