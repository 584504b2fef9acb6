//! Evaluation of `T_X = Σ_{uv ∈ E} f(deg u) f(deg v)` on a concrete graph.

use serde::Serialize;

use crate::graph::Graph;
use crate::vfunc::VertexFunction;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexValue {
    /// `T_X`.
    pub value: f64,
    /// `T_1`, the number of edges.
    pub edge_count: usize,
}

/// Sums `f(deg u) f(deg v)` once per unordered edge.
pub fn topo_index(g: &Graph, f: &VertexFunction) -> IndexValue {
    let x: Vec<f64> = (0..g.n()).map(|v| f.eval(g.degree(v))).collect();
    let value = g.edges().fold(0.0, |acc, (u, v)| acc + x[u] * x[v]);
    IndexValue {
        value,
        edge_count: g.edge_count(),
    }
}

/// Half the sum of `f(deg u) f(deg v)` over ordered adjacent pairs `(u, v)`.
/// Agrees with [`topo_index`]; kept as an independent route for cross-checks.
pub fn topo_index_sum_form(g: &Graph, f: &VertexFunction) -> f64 {
    let n = g.n();
    let mut total = 0.0;
    for u in 0..n {
        for v in 0..n {
            if g.has_edge(u, v) {
                total += f.eval(g.degree(u)) * f.eval(g.degree(v));
            }
        }
    }
    0.5 * total
}
