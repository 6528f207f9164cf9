//! Ground-truth graphons, step-function grids and the model-backed graphon.
//!
//! Every kind is evaluated on the canonical pair `(min(x, y), max(x, y))`,
//! which makes `eval(x, y) == eval(y, x)` hold bit-for-bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::inr::InrParams;

/// Number of closed-form graphons in the zoo.
pub const NUM_ANALYTIC: u8 = 13;

/// Symmetric `R x R` step function, stored row-major. Cell `i` covers
/// `[i/R, (i+1)/R)`, the last cell also owning `x = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    resolution: usize,
    values: Vec<f64>,
}

impl Grid {
    /// Checks shape, range and symmetry.
    pub fn new(resolution: usize, values: Vec<f64>) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::invalid("grid resolution must be positive"));
        }
        if values.len() != resolution * resolution {
            return Err(Error::invalid(format!(
                "grid of resolution {resolution} needs {} values, got {}",
                resolution * resolution,
                values.len()
            )));
        }
        for i in 0..resolution {
            for j in 0..resolution {
                let v = values[i * resolution + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::invalid(format!("grid value {v} at ({i}, {j}) outside [0, 1]")));
                }
                if v != values[j * resolution + i] {
                    return Err(Error::invalid(format!("grid is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Grid { resolution, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        if rows.iter().any(|row| row.len() != r) {
            return Err(Error::invalid("grid rows must form a square matrix"));
        }
        Self::new(r, rows.concat())
    }

    pub fn constant(resolution: usize, p: f64) -> Result<Self> {
        Self::new(resolution, vec![p; resolution * resolution])
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.resolution + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.resolution..(i + 1) * self.resolution]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cell containing coordinate `x`.
    #[inline]
    pub fn cell(&self, x: f64) -> usize {
        ((x * self.resolution as f64) as usize).min(self.resolution - 1)
    }

    /// Cell-center coordinate of cell `i`.
    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.resolution as f64
    }

    /// Row means, the discrete degree function.
    pub fn row_means(&self) -> Vec<f64> {
        (0..self.resolution)
            .map(|i| self.row(i).iter().sum::<f64>() / self.resolution as f64)
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn std_dev(&self) -> f64 {
        let mean = self.mean();
        let var = self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.values.len() as f64;
        var.sqrt()
    }

    /// Same grid with rows and columns both reordered: new index `k` holds
    /// old index `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let r = self.resolution;
        assert_eq!(order.len(), r);
        let mut values = Vec::with_capacity(r * r);
        for &i in order {
            for &j in order {
                values.push(self.get(i, j));
            }
        }
        Grid { resolution: r, values }
    }

    /// CSV: first line `R`, then `R` rows of comma-separated decimals. Values
    /// use the shortest representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", self.resolution);
        for i in 0..self.resolution {
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            message: "missing resolution line".into(),
        })?;
        let resolution: usize = head.trim().parse().map_err(|_| Error::Parse {
            line: 1,
            message: format!("`{}` is not a resolution", head.trim()),
        })?;
        let mut values = Vec::with_capacity(resolution * resolution);
        let mut rows = 0;
        for (idx, line) in lines {
            rows += 1;
            let before = values.len();
            for tok in line.split(',') {
                let v: f64 = tok.trim().parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("`{}` is not a number", tok.trim()),
                })?;
                values.push(v);
            }
            if values.len() - before != resolution {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {resolution} values, got {}", values.len() - before),
                });
            }
        }
        if rows != resolution {
            return Err(Error::Parse {
                line: rows + 1,
                message: format!("expected {resolution} rows, got {rows}"),
            });
        }
        Self::new(resolution, values)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text).map_err(|e| Error::in_file(path, e))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphonKind {
    /// Closed-form graphon `1..=13` from the zoo.
    Analytic(u8),
    Constant(f64),
    /// `0.5 + 0.1 cos(pi x) cos(pi y)`.
    Cosine,
    Grid(Grid),
    Model(InrParams),
}

/// Symmetric measurable kernel `[0,1]^2 -> [0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graphon {
    kind: GraphonKind,
}

impl Graphon {
    pub fn analytic(id: u8) -> Result<Self> {
        if !(1..=NUM_ANALYTIC).contains(&id) {
            return Err(Error::invalid(format!(
                "analytic graphon id {id} outside 1..={NUM_ANALYTIC}"
            )));
        }
        Ok(Graphon {
            kind: GraphonKind::Analytic(id),
        })
    }

    pub fn constant(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("constant graphon value {p} outside [0, 1]")));
        }
        Ok(Graphon {
            kind: GraphonKind::Constant(p),
        })
    }

    pub fn cosine() -> Self {
        Graphon {
            kind: GraphonKind::Cosine,
        }
    }

    pub fn grid(grid: Grid) -> Self {
        Graphon {
            kind: GraphonKind::Grid(grid),
        }
    }

    pub fn model(params: InrParams) -> Self {
        Graphon {
            kind: GraphonKind::Model(params),
        }
    }

    pub fn kind(&self) -> &GraphonKind {
        &self.kind
    }

    /// Evaluates `W(x, y)`, rejecting coordinates outside the unit square.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(Error::Domain { x, y });
        }
        Ok(self.value(x, y))
    }

    /// Unchecked evaluation for hot loops; callers guarantee `x, y` in `[0, 1]`.
    #[inline]
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        match &self.kind {
            GraphonKind::Analytic(id) => analytic_value(*id, lo, hi),
            GraphonKind::Constant(p) => *p,
            GraphonKind::Cosine => 0.5 + 0.1 * (std::f64::consts::PI * lo).cos() * (std::f64::consts::PI * hi).cos(),
            GraphonKind::Grid(g) => g.get(g.cell(lo), g.cell(hi)),
            GraphonKind::Model(params) => params.forward_canonical(lo, hi),
        }
    }

    /// Short human-readable label, e.g. `analytic:4` or `constant:0.3`.
    pub fn label(&self) -> String {
        match &self.kind {
            GraphonKind::Analytic(id) => format!("analytic:{id}"),
            GraphonKind::Constant(p) => format!("constant:{p}"),
            GraphonKind::Cosine => "cosine".into(),
            GraphonKind::Grid(g) => format!("grid(R={})", g.resolution()),
            GraphonKind::Model(p) => format!("model(H={})", p.hidden()),
        }
    }
}

/// Closed forms, evaluated on canonical `lo <= hi`.
fn analytic_value(id: u8, lo: f64, hi: f64) -> f64 {
    let (x, y) = (lo, hi);
    match id {
        1 => x * y,
        2 => (-(x.powf(0.7) + y.powf(0.7))).exp(),
        3 => 0.25 * (x * x + y * y + x.sqrt() + y.sqrt()),
        4 => 0.5 * (x + y),
        5 => 1.0 / (1.0 + (-2.0 * (x * x + y * y)).exp()),
        6 => 1.0 / (1.0 + (-(hi * hi) - lo.powi(4)).exp()),
        7 => (-hi.powf(0.75)).exp(),
        8 => (-0.5 * (lo + x.sqrt() + y.sqrt())).exp(),
        9 => (1.0 + hi).ln(),
        10 => hi - lo,
        11 => 1.0 - (hi - lo),
        12 => {
            if half_block(lo) == half_block(hi) {
                0.8
            } else {
                0.0
            }
        }
        13 => {
            if half_block(lo) != half_block(hi) {
                0.8
            } else {
                0.0
            }
        }
        _ => unreachable!("analytic id validated at construction"),
    }
}

/// Half-block index `floor(2x)`, with `x = 1` kept in the upper block.
#[inline]
fn half_block(x: f64) -> u8 {
    ((2.0 * x) as u8).min(1)
}

/// Samples `w` at cell centers: `values[i][j] = w((i+0.5)/R, (j+0.5)/R)`.
pub fn discretize(w: &Graphon, resolution: usize) -> Result<Grid> {
    if resolution == 0 {
        return Err(Error::invalid("discretization resolution must be positive"));
    }
    let r = resolution;
    let centers: Vec<f64> = (0..r).map(|i| (i as f64 + 0.5) / r as f64).collect();
    let mut values = vec![0.0; r * r];
    for i in 0..r {
        for j in i..r {
            let v = w.value(centers[i], centers[j]);
            values[i * r + j] = v;
            values[j * r + i] = v;
        }
    }
    Ok(Grid {
        resolution: r,
        values,
    })
}

/// Parses a graphon spec: `<id>`, `constant:<p>`, `cosine`, `grid:<path>` or
/// `model:<path>`.
pub fn parse_graphon_spec(spec: &str) -> Result<Graphon> {
    let spec = spec.trim();
    if let Ok(id) = spec.parse::<u8>() {
        return Graphon::analytic(id);
    }
    if spec == "cosine" {
        return Ok(Graphon::cosine());
    }
    match spec.split_once(':') {
        Some(("constant", p)) => {
            let p: f64 = p
                .parse()
                .map_err(|_| Error::invalid(format!("`{p}` is not a probability")))?;
            Graphon::constant(p)
        }
        Some(("analytic", id)) => {
            let id: u8 = id
                .parse()
                .map_err(|_| Error::invalid(format!("`{id}` is not a graphon id")))?;
            Graphon::analytic(id)
        }
        Some(("grid", path)) => Ok(Graphon::grid(Grid::read(Path::new(path))?)),
        Some(("model", path)) => Ok(Graphon::model(InrParams::read(Path::new(path))?)),
        _ => Err(Error::invalid(format!(
            "unrecognized graphon spec `{spec}` (expected <id>, constant:<p>, cosine, grid:<path> or model:<path>)"
        ))),
    }
}
