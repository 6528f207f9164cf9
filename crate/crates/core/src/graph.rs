//! Simple undirected graphs, the edge-list text format, and graph sampling
//! from a graphon.
//!
//! Edge-list format: one `u v` pair per line, blank lines and lines starting
//! with `#` ignored, and an optional `n <N>` header fixing the vertex count
//! (the only way to represent isolated trailing vertices).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graphon::Graphon;
use crate::rng;

/// Simple undirected graph stored as sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    num_edges: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            num_edges: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges (in either orientation) and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        let mut num_edges = 0;
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({u}, {})",
                    w[0]
                )));
            }
            num_edges += list.len();
        }
        Ok(Graph {
            adj,
            num_edges: num_edges / 2,
        })
    }

    /// Assembles a graph from per-vertex lists that are already known to be
    /// valid (sorted, symmetric, loop-free).
    fn from_sorted_lists(adj: Vec<Vec<u32>>) -> Self {
        let num_edges = adj.iter().map(Vec::len).sum::<usize>() / 2;
        let g = Graph { adj, num_edges };
        debug_assert!(g.validate().is_ok());
        g
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n)
            .map(|u| (0..n as u32).filter(|&v| v as usize != u).collect())
            .collect();
        Self::from_sorted_lists(adj)
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle edges are valid")
    }

    /// Star with vertex 0 as the hub.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(|&v| v as usize)
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Fraction of vertex pairs joined by an edge (0 when n < 2).
    pub fn edge_density(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        self.num_edges as f64 / (n * (n - 1) / 2) as f64
    }

    /// Checks every structural invariant: indices in range, sorted lists, no
    /// loops or duplicates, symmetric adjacency, consistent edge count.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let mut half_edges = 0;
        for (u, list) in self.adj.iter().enumerate() {
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidGraph(format!(
                        "adjacency of {u} is not strictly increasing"
                    )));
                }
            }
            for &v in list {
                let v = v as usize;
                if v >= n {
                    return Err(Error::InvalidGraph(format!("neighbor {v} of {u} out of range")));
                }
                if v == u {
                    return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
                }
                if self.adj[v].binary_search(&(u as u32)).is_err() {
                    return Err(Error::InvalidGraph(format!("edge ({u}, {v}) is not symmetric")));
                }
            }
            half_edges += list.len();
        }
        if half_edges != 2 * self.num_edges {
            return Err(Error::InvalidGraph("edge count out of sync".into()));
        }
        Ok(())
    }
}

/// Parses the edge-list text format.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut header: Option<usize> = None;
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    let mut max_index: Option<usize> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().unwrap_or_default();
        let second = tokens.next();
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two fields, got `{line}`"),
            });
        }
        let Some(second) = second else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two fields, got `{line}`"),
            });
        };
        let parse_index = |tok: &str| {
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{tok}` is not a non-negative integer"),
            })
        };
        if first == "n" {
            if header.is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: "repeated `n` header".into(),
                });
            }
            header = Some(parse_index(second)?);
            continue;
        }
        let u = parse_index(first)?;
        let v = parse_index(second)?;
        if u == v {
            return Err(Error::InvalidGraph(format!("line {line_no}: self-loop at vertex {u}")));
        }
        max_index = Some(max_index.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v));
        edge_lines.push(line_no);
    }

    let n = match (header, max_index) {
        (Some(n), Some(m)) if m >= n => {
            return Err(Error::InvalidGraph(format!(
                "vertex {m} exceeds header vertex count {n}"
            )))
        }
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => 0,
    };

    // Duplicate detection with line numbers; `from_edges` would catch them too
    // but without telling the user where.
    let mut keyed: Vec<((usize, usize), usize)> = edges
        .iter()
        .zip(&edge_lines)
        .map(|(&(u, v), &line)| ((u.min(v), u.max(v)), line))
        .collect();
    keyed.sort_unstable();
    if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
        let (u, v) = w[0].0;
        return Err(Error::InvalidGraph(format!(
            "line {}: duplicate edge ({u}, {v}) first seen on line {}",
            w[1].1.max(w[0].1),
            w[1].1.min(w[0].1)
        )));
    }

    Graph::from_edges(n, edges)
}

/// Canonical edge-list text: `n <N>` header, then one `u v` line per edge
/// with `u < v`, lexicographically sorted, no trailing newline.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}", g.n());
    for (u, v) in g.edges() {
        let _ = write!(out, "\n{u} {v}");
    }
    out
}

/// A graph drawn from a graphon together with the latent position of every
/// vertex and the seed that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledGraph {
    pub graph: Graph,
    pub latents: Vec<f64>,
    pub seed: u64,
}

/// Samples from the W-random graph model.
///
/// Latents are the first `n` uniform draws of the seed's main stream (kept
/// unsorted); afterwards one uniform draw per vertex pair is consumed in
/// row-major `(i, j), i < j` order and the edge is present iff the draw is
/// below `w(latent_i, latent_j)`.
pub fn sample_graph(w: &Graphon, n: usize, seed: u64) -> SampledGraph {
    let mut rng = rng::seeded(seed);
    let latents: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let p = w.value(latents[i], latents[j]);
            if rng.gen::<f64>() < p {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
    }
    // Row-major insertion already leaves every list sorted: vertex j receives
    // neighbors i < j in increasing i before any of its own j < k pairs.
    SampledGraph {
        graph: Graph::from_sorted_lists(adj),
        latents,
        seed,
    }
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text).map_err(|e| Error::in_file(path, e))
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    let mut text = write_edge_list(g);
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_latents(path: &Path, latents: &[f64]) -> Result<()> {
    let mut text = String::new();
    for x in latents {
        let _ = writeln!(text, "{x}");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_latents(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let x: f64 = l.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("`{}` is not a number", l.trim()),
            })?;
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("latent {x} outside [0, 1]"),
                });
            }
            Ok(x)
        })
        .collect::<Result<_>>()
        .map_err(|e| Error::in_file(path, e))
}

/// Lists the `.edges` files of a dataset directory in filename order.
pub fn dataset_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|ext| ext == "edges") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Reads every `.edges` file of a dataset directory, in filename order.
pub fn read_dataset(dir: &Path) -> Result<Vec<(PathBuf, Graph)>> {
    dataset_files(dir)?
        .into_iter()
        .map(|p| read_graph(&p).map(|g| (p, g)))
        .collect()
}

/// Writes `<stem>.edges` and `<stem>.latents` into `dir`.
pub fn write_sampled(dir: &Path, stem: &str, sample: &SampledGraph) -> Result<()> {
    write_graph(&dir.join(format!("{stem}.edges")), &sample.graph)?;
    write_latents(&dir.join(format!("{stem}.latents")), &sample.latents)
}
