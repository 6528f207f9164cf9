//! Centrality functions of a graphon.
//!
//! Numeric profiles use the cell-center grid and the operator
//! `(T c)_i = (1/R) sum_j W_ij c_j`. Profiles are scaled to unit Euclidean
//! norm over their evaluation points before comparison.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphon::{discretize, Graphon, Grid};

pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITERATIONS: usize = 100_000;
pub const DEFAULT_KATZ_ALPHA: f64 = 0.5;
pub const DEFAULT_PAGERANK_BETA: f64 = 0.85;

/// `int_0^1 exp(-y^0.7) dy`.
const EXP_KERNEL_MASS: f64 = 0.575_684_535_623_520_7;
/// `int_0^1 exp(-2 y^0.7) dy`, the nonzero eigenvalue of graphon 2.
const EXP_KERNEL_EIGENVALUE: f64 = 0.356_522_919_033_396_6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "measure", content = "param", rename_all = "lowercase")]
pub enum Measure {
    Degree,
    Eigenvector,
    Katz(f64),
    PageRank(f64),
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Degree => f.write_str("degree"),
            Measure::Eigenvector => f.write_str("eigenvector"),
            Measure::Katz(a) => write!(f, "katz:{a}"),
            Measure::PageRank(b) => write!(f, "pagerank:{b}"),
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    /// `degree`, `eigenvector`, `katz[:alpha]` or `pagerank[:beta]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => {
                let v: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad centrality parameter in {s:?}")))?;
                (n.trim(), Some(v))
            }
            None => (s.trim(), None),
        };
        let m = match (name, param) {
            ("degree", None) => Measure::Degree,
            ("eigenvector", None) => Measure::Eigenvector,
            ("katz", p) => Measure::Katz(p.unwrap_or(DEFAULT_KATZ_ALPHA)),
            ("pagerank", p) => Measure::PageRank(p.unwrap_or(DEFAULT_PAGERANK_BETA)),
            _ => return Err(Error::invalid(format!("unknown centrality measure {s:?}"))),
        };
        m.validate()?;
        Ok(m)
    }
}

impl Measure {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Measure::Katz(a) if !(a > 0.0 && a.is_finite()) => {
                Err(Error::invalid(format!("Katz alpha must be positive, got {a}")))
            }
            Measure::PageRank(b) if !(0.0..1.0).contains(&b) => {
                Err(Error::invalid(format!("PageRank beta must lie in [0, 1), got {b}")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralityProfile {
    pub measure: Measure,
    pub xs: Vec<f64>,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl CentralityProfile {
    fn new(measure: Measure, xs: Vec<f64>, raw: Vec<f64>) -> Result<Self> {
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Consistency(format!("{measure} profile has norm {norm}")));
        }
        let normalized = raw.iter().map(|v| v / norm).collect();
        Ok(CentralityProfile {
            measure,
            xs,
            raw,
            normalized,
        })
    }

    /// Two-column `x,value` CSV of the normalized profile.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,value\n");
        for (x, v) in self.xs.iter().zip(&self.normalized) {
            writeln!(s, "{x},{v}").unwrap();
        }
        s
    }
}

/// Cell-center abscissae `(i + 0.5) / r`.
pub fn centers(r: usize) -> Vec<f64> {
    (0..r).map(|i| (i as f64 + 0.5) / r as f64).collect()
}

/// Closed-form profiles for graphon 1 (`xy`) and graphon 2
/// (`exp(-(x^0.7 + y^0.7))`).
pub fn analytic_centrality(graphon_id: u8, measure: Measure, xs: &[f64]) -> Result<CentralityProfile> {
    measure.validate()?;
    if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::invalid(format!("abscissa {x} outside [0, 1]")));
    }
    let f: Box<dyn Fn(f64) -> f64> = match (graphon_id, measure) {
        (1, Measure::Degree) => Box::new(|x| x / 2.0),
        (1, Measure::Eigenvector) => Box::new(|x| 3f64.sqrt() * x),
        (1, Measure::Katz(a)) => Box::new(move |x| (6.0 - 2.0 * a) + 3.0 * a * x),
        (1, Measure::PageRank(b)) => Box::new(move |x| (1.0 - b) + 2.0 * b * x),
        (2, m) => {
            let (d, lam) = (EXP_KERNEL_MASS, EXP_KERNEL_EIGENVALUE);
            let e = |x: f64| (-x.powf(0.7)).exp();
            match m {
                Measure::Degree => Box::new(move |x| d * e(x)),
                Measure::Eigenvector => Box::new(move |x| e(x) / lam.sqrt()),
                Measure::Katz(a) => Box::new(move |x| 1.0 + d * a * e(x) / (1.0 - lam * a)),
                Measure::PageRank(b) => Box::new(move |x| (1.0 - b) + b / d * e(x)),
            }
        }
        _ => {
            return Err(Error::invalid(format!(
                "analytic centrality is available for graphons 1 and 2, not {graphon_id}"
            )))
        }
    };
    if let (2, Measure::Katz(a)) = (graphon_id, measure) {
        if a * EXP_KERNEL_EIGENVALUE >= 1.0 {
            return Err(Error::KatzDivergence(a * EXP_KERNEL_EIGENVALUE));
        }
    }
    if let (1, Measure::Katz(a)) = (graphon_id, measure) {
        if a / 3.0 >= 1.0 {
            return Err(Error::KatzDivergence(a / 3.0));
        }
    }
    let raw = xs.iter().map(|&x| f(x)).collect();
    CentralityProfile::new(measure, xs.to_vec(), raw)
}

fn apply(grid: &Grid, c: &[f64], out: &mut [f64]) {
    let r = grid.resolution() as f64;
    for (i, o) in out.iter_mut().enumerate() {
        *o = grid.row(i).iter().zip(c).map(|(w, v)| w * v).sum::<f64>() / r;
    }
}

/// Dominant eigenpair of `T` by power iteration on `T + s I`, where the
/// shift `s` (the largest row sum) keeps the spectrum non-negative so a
/// negative eigenvalue of equal magnitude cannot stall the iteration.
/// The vector has unit norm and a positive largest-magnitude entry.
pub fn dominant_eigenpair(grid: &Grid) -> Result<(f64, Vec<f64>)> {
    let r = grid.resolution();
    let shift = grid.row_means().into_iter().fold(0.0, f64::max);
    let mut v = vec![1.0 / (r as f64).sqrt(); r];
    let mut next = vec![0.0; r];
    for _ in 0..POWER_MAX_ITERATIONS {
        apply(grid, &v, &mut next);
        for (n, x) in next.iter_mut().zip(&v) {
            *n += shift * x;
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::invalid("graphon is identically zero; no dominant eigenvector"));
        }
        let mut diff: f64 = 0.0;
        for (n, x) in next.iter_mut().zip(&v) {
            *n /= norm;
            diff = diff.max((*n - x).abs());
        }
        std::mem::swap(&mut v, &mut next);
        if diff < POWER_TOLERANCE {
            let lambda = norm - shift;
            let big = v.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if big < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            return Ok((lambda, v));
        }
    }
    Err(Error::Consistency(format!(
        "power iteration did not reach tolerance {POWER_TOLERANCE} in {POWER_MAX_ITERATIONS} iterations"
    )))
}

fn fixed_point<F>(r: usize, init: f64, mut step: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let mut c = vec![init; r];
    let mut next = vec![0.0; r];
    for _ in 0..POWER_MAX_ITERATIONS {
        step(&c, &mut next);
        let diff = c.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let scale = next.iter().map(|x| x.abs()).fold(1.0, f64::max);
        std::mem::swap(&mut c, &mut next);
        if diff <= POWER_TOLERANCE * scale {
            return Ok(c);
        }
    }
    Err(Error::Consistency("centrality fixed point did not converge".into()))
}

/// Centrality of `w` on an `r`-point cell-center grid.
pub fn numeric_centrality(w: &Graphon, measure: Measure, r: usize) -> Result<CentralityProfile> {
    measure.validate()?;
    if r < 2 {
        return Err(Error::invalid(format!("resolution must be at least 2, got {r}")));
    }
    let grid = discretize(w, r)?;
    let raw = match measure {
        Measure::Degree => grid.row_means(),
        Measure::Eigenvector => dominant_eigenpair(&grid)?.1,
        Measure::Katz(alpha) => {
            let (lambda, _) = dominant_eigenpair(&grid)?;
            if alpha * lambda >= 1.0 {
                return Err(Error::KatzDivergence(alpha * lambda));
            }
            fixed_point(r, 1.0, |c, out| {
                apply(&grid, c, out);
                out.iter_mut().for_each(|o| *o = 1.0 + alpha * *o);
            })?
        }
        Measure::PageRank(beta) => {
            let deg = grid.row_means();
            let mut scaled = vec![0.0; r];
            fixed_point(r, 1.0, |c, out| {
                // Isolated points pass no mass on.
                for ((s, &ci), &d) in scaled.iter_mut().zip(c).zip(&deg) {
                    *s = if d > 0.0 { ci / d } else { 0.0 };
                }
                apply(&grid, &scaled, out);
                out.iter_mut().for_each(|o| *o = (1.0 - beta) + beta * *o);
            })?
        }
    };
    CentralityProfile::new(measure, centers(r), raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Measure; 4] = [
        Measure::Degree,
        Measure::Eigenvector,
        Measure::Katz(0.5),
        Measure::PageRank(0.85),
    ];

    #[test]
    fn parse_and_display() {
        assert_eq!("degree".parse::<Measure>().unwrap(), Measure::Degree);
        assert_eq!("katz".parse::<Measure>().unwrap(), Measure::Katz(DEFAULT_KATZ_ALPHA));
        assert_eq!("pagerank:0.5".parse::<Measure>().unwrap(), Measure::PageRank(0.5));
        assert_eq!(Measure::Katz(0.25).to_string(), "katz:0.25");
        assert!("pagerank:1.5".parse::<Measure>().is_err());
        assert!("closeness".parse::<Measure>().is_err());
        assert!("degree:2".parse::<Measure>().is_err());
    }

    #[test]
    fn analytic_raw_values() {
        let d = analytic_centrality(1, Measure::Degree, &[1.0]).unwrap();
        assert_eq!(d.raw, vec![0.5]);
        let e = analytic_centrality(1, Measure::Eigenvector, &[1.0]).unwrap();
        assert!((e.raw[0] - 1.732_050_8).abs() < 1e-7);
        let p = analytic_centrality(1, Measure::PageRank(0.85), &[0.5]).unwrap();
        assert!((p.raw[0] - 1.0).abs() < 1e-15);
        assert!(analytic_centrality(3, Measure::Degree, &[0.5]).is_err());
        assert!(analytic_centrality(1, Measure::Degree, &[1.5]).is_err());
    }

    #[test]
    fn exp_kernel_constants_match_series() {
        // int_0^1 exp(-a y^0.7) dy = sum_n (-a)^n / (n! (0.7 n + 1)).
        let series = |a: f64| {
            let (mut term, mut sum) = (1.0, 0.0);
            for n in 0..60 {
                sum += term / (0.7 * n as f64 + 1.0);
                term *= -a / (n + 1) as f64;
            }
            sum
        };
        assert!((series(1.0) - EXP_KERNEL_MASS).abs() < 1e-15);
        assert!((series(2.0) - EXP_KERNEL_EIGENVALUE).abs() < 1e-15);
    }

    #[test]
    fn normalized_profiles_have_unit_norm() {
        let xs = centers(37);
        for id in [1, 2] {
            for m in ALL {
                let p = analytic_centrality(id, m, &xs).unwrap();
                let n: f64 = p.normalized.iter().map(|v| v * v).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_graphon_profiles_are_flat() {
        let w = Graphon::constant(0.3).unwrap();
        for m in ALL {
            let p = numeric_centrality(&w, m, 20).unwrap();
            let first = p.normalized[0];
            assert!(p.normalized.iter().all(|v| (v - first).abs() < 1e-9), "{m}");
        }
    }

    #[test]
    fn numeric_matches_analytic_and_converges() {
        for id in [1u8, 2] {
            let w = Graphon::analytic(id).unwrap();
            for m in ALL {
                let dev = |r: usize| {
                    let num = numeric_centrality(&w, m, r).unwrap();
                    let ana = analytic_centrality(id, m, &num.xs).unwrap();
                    num.normalized
                        .iter()
                        .zip(&ana.normalized)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                };
                let (coarse, fine) = (dev(125), dev(500));
                assert!(fine <= 0.01, "graphon {id} {m}: {fine}");
                // Rank-one kernels give the eigenvector exactly at any R.
                assert!(fine <= 0.5 * coarse || fine < 1e-8, "graphon {id} {m}: {coarse} -> {fine}");
            }
        }
    }

    #[test]
    fn katz_divergence_is_reported() {
        let w = Graphon::constant(1.0).unwrap();
        assert!(matches!(
            numeric_centrality(&w, Measure::Katz(1.5), 10),
            Err(Error::KatzDivergence(_))
        ));
        assert!(matches!(
            analytic_centrality(1, Measure::Katz(3.0), &[0.5]),
            Err(Error::KatzDivergence(_))
        ));
    }

    #[test]
    fn eigenpair_of_two_block_graphon() {
        // Off-diagonal blocks: eigenvalues +0.4 and -0.4. The shift keeps the
        // iteration from oscillating between them.
        let w = Graphon::analytic(13).unwrap();
        let grid = discretize(&w, 10).unwrap();
        let (lambda, v) = dominant_eigenpair(&grid).unwrap();
        assert!((lambda - 0.4).abs() < 1e-9);
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-9 && *x > 0.0));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = analytic_centrality(1, Measure::Degree, &[0.25, 0.75]).unwrap();
        let csv = p.to_csv();
        assert!(csv.starts_with("x,value\n0.25,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
