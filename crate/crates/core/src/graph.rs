//! Simple undirected labeled graphs, the `G(n, p)` law, and the edge-list text format.
//!
//! Vertices are `0..n`. The edge-list format is
//!
//! ```text
//! # comment
//! n=3
//! 0 1
//! 1 2
//! ```
//!
//! with one undirected edge per line, each listed once.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n`.
///
/// Edges are stored as `(u, v)` with `u < v`, sorted, so two graphs with the same
/// edge set compare equal regardless of how they were built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    degrees: Vec<u32>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            degrees: vec![0; n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n as u32)
            .flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)))
            .collect();
        Self::from_sorted_unchecked(n, edges)
    }

    /// Path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges = (1..n as u32).map(|v| (v - 1, v)).collect();
        Self::from_sorted_unchecked(n, edges)
    }

    /// Builds a graph from an edge iterator, rejecting self-loops, duplicates
    /// (in either orientation) and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (u, v) in edges {
            check_edge(n, u, v, &seen).map_err(Error::Param)?;
            let e = ordered(u, v);
            seen.insert(e);
            out.push((e.0 as u32, e.1 as u32));
        }
        out.sort_unstable();
        Ok(Self::from_sorted_unchecked(n, out))
    }

    fn from_sorted_unchecked(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut degrees = vec![0u32; n];
        for &(u, v) in &edges {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        Self { n, edges, degrees }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|&(u, v)| (u as usize, v as usize))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v] as usize
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.degrees.iter().map(|&d| d as usize).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v || u >= self.n || v >= self.n {
            return false;
        }
        let (a, b) = ordered(u, v);
        self.edges.binary_search(&(a as u32, b as u32)).is_ok()
    }

    /// Degree value → number of vertices with that degree.
    pub fn degree_histogram(&self) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for &d in &self.degrees {
            *hist.entry(d as usize).or_insert(0) += 1;
        }
        hist
    }

    /// Image of the graph under the vertex map `v -> perm[v]`.
    ///
    /// # Panics
    ///
    /// Panics if `perm` is not a permutation of `0..n`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n, "permutation length must equal n");
        let mut hit = vec![false; self.n];
        for &p in perm {
            assert!(p < self.n && !hit[p], "not a permutation");
            hit[p] = true;
        }
        Graph::from_edges(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
            .expect("relabeling preserves simplicity")
    }
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn check_edge(n: usize, u: usize, v: usize, seen: &HashSet<(usize, usize)>) -> std::result::Result<(), String> {
    if u >= n || v >= n {
        return Err(format!("vertex index {} out of range for n = {n}", u.max(v)));
    }
    if u == v {
        return Err(format!("self-loop at vertex {u}"));
    }
    if seen.contains(&ordered(u, v)) {
        return Err(format!("duplicate edge {u} {v}"));
    }
    Ok(())
}

/// Parameters of the random-graph law `G(n, p)`, with `p = alpha / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    p: f64,
    alpha: f64,
}

impl ModelParams {
    /// `p = alpha / n`. Requires `n >= 1` and `0 < alpha <= n`.
    pub fn from_alpha(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("n must be at least 1".into()));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Param(format!("alpha must be positive, got {alpha}")));
        }
        let p = alpha / n as f64;
        if p > 1.0 {
            return Err(Error::Param(format!(
                "alpha = {alpha} exceeds n = {n}, giving edge probability {p} > 1"
            )));
        }
        Ok(Self { n, p, alpha })
    }

    /// Direct edge probability; `alpha` is recorded as `p * n`. `p = 0` is
    /// accepted here (the empty-graph law).
    pub fn from_p(n: usize, p: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Param("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Param(format!("edge probability must lie in [0, 1], got {p}")));
        }
        Ok(Self {
            n,
            p,
            alpha: p * n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of vertex pairs, `C(n, 2)`.
    pub fn pairs(&self) -> f64 {
        let n = self.n as f64;
        n * (n - 1.0) / 2.0
    }

    /// `E[|E|] = C(n, 2) p`.
    pub fn expected_edges(&self) -> f64 {
        self.pairs() * self.p
    }
}

/// Draws a graph from `G(n, p)`.
///
/// The whole graph comes from a single ChaCha8 stream keyed by `seed`, walking the
/// pair sequence `(0,1), (0,2), (1,2), (0,3), ...` with geometric skips, so the
/// cost is proportional to the number of edges. Equal `(params, seed)` always give
/// equal graphs; no state is shared between calls.
pub fn sample_gnp(params: &ModelParams, seed: u64) -> Graph {
    let n = params.n();
    let p = params.p();
    if p <= 0.0 || n < 2 {
        return Graph::empty(n);
    }
    if p >= 1.0 {
        return Graph::complete(n);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_q = (-p).ln_1p();
    let mut edges = Vec::with_capacity((params.expected_edges() * 1.2) as usize + 8);

    // Batagelj & Brandes: (v, w) runs over pairs with w < v.
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.gen();
        let skip = ((-r).ln_1p() / log_q).floor();
        // a skip past every remaining pair ends the walk
        if skip >= (n * n) as f64 {
            break;
        }
        w += 1 + skip as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as u32, v as u32));
        }
    }
    edges.sort_unstable();
    Graph::from_sorted_unchecked(n, edges)
}

/// Parses the edge-list format. Lines starting with `#` and blank lines are
/// skipped; the first remaining line must be `n=<int>`.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut n: Option<usize> = None;
    let mut seen = HashSet::new();
    let mut edges = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: lineno, msg };

        let Some(n) = n else {
            let value = trimmed
                .strip_prefix("n=")
                .ok_or_else(|| parse_err(format!("expected header `n=<int>`, found `{trimmed}`")))?;
            let parsed: usize = value
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("bad vertex count `{value}`")))?;
            if parsed == 0 {
                return Err(parse_err("vertex count must be positive".into()));
            }
            n = Some(parsed);
            continue;
        };

        let mut fields = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(format!("expected `<u> <v>`, found `{trimmed}`")));
        };
        let u: usize = a
            .parse()
            .map_err(|_| parse_err(format!("bad vertex index `{a}`")))?;
        let v: usize = b
            .parse()
            .map_err(|_| parse_err(format!("bad vertex index `{b}`")))?;
        check_edge(n, u, v, &seen).map_err(parse_err)?;
        let e = ordered(u, v);
        seen.insert(e);
        edges.push((e.0 as u32, e.1 as u32));
    }

    let n = n.ok_or(Error::Parse {
        line: 0,
        msg: "missing header `n=<int>`".into(),
    })?;
    edges.sort_unstable();
    Ok(Graph::from_sorted_unchecked(n, edges))
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n={}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
