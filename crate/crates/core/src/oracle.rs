//! Exact expectations under `G(n, p)` by summing over all `2^C(n,2)` labeled
//! graphs on `n <= 7` vertices.
//!
//! Graphs are indexed by bitmasks over the pairs `(0,1), (0,2), ..., (n-2,n-1)`
//! in lexicographic order. Masks are processed in fixed-size chunks whose partial
//! sums are added in chunk order, so results do not depend on the thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::index::topo_index;
use crate::vfunc::VertexFunction;

pub const MAX_ORACLE_N: usize = 7;
/// [`independence_check`] materialises a joint pmf; it is capped lower.
pub const MAX_INDEPENDENCE_N: usize = 6;

const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationBudget {
    n: usize,
    p: f64,
    pairs: Vec<(usize, usize)>,
    /// `weights[e] = p^e (1-p)^(M-e)`
    weights: Vec<f64>,
}

impl EnumerationBudget {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        if n > MAX_ORACLE_N {
            return Err(Error::Budget {
                n,
                max: MAX_ORACLE_N,
            });
        }
        if n == 0 {
            return Err(Error::Param("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Param(format!("edge probability must lie in [0, 1], got {p}")));
        }
        let pairs: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        let m = pairs.len() as i32;
        let weights = (0..=m).map(|e| p.powi(e) * (1.0 - p).powi(m - e)).collect();
        Ok(Self { n, p, pairs, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn graph_count(&self) -> u64 {
        1u64 << self.pairs.len()
    }

    fn graph(&self, mask: u64) -> Graph {
        let edges = self
            .pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        Graph::from_edges(self.n, edges).expect("pair list is simple")
    }

    fn weight(&self, mask: u64) -> f64 {
        self.weights[mask.count_ones() as usize]
    }

    fn pair_index(&self, u: usize, v: usize) -> usize {
        self.pairs
            .iter()
            .position(|&e| e == (u.min(v), u.max(v)))
            .expect("pair in range")
    }

    /// Sums `visit(graph, weight)` over every mask containing all of `required`,
    /// chunk by chunk, merging partial results in chunk order.
    fn fold<A, F, M>(&self, required: u64, visit: F, merge: M) -> A
    where
        A: Send + Default,
        F: Fn(&mut A, &Graph, f64) + Sync,
        M: Fn(A, A) -> A,
    {
        let total = self.graph_count();
        let chunks = total.div_ceil(CHUNK);
        let partials: Vec<A> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = A::default();
                for mask in c * CHUNK..((c + 1) * CHUNK).min(total) {
                    if mask & required == required {
                        visit(&mut acc, &self.graph(mask), self.weight(mask));
                    }
                }
                acc
            })
            .collect();
        partials.into_iter().fold(A::default(), merge)
    }
}

/// `E[statistic(G)]`, exact up to rounding.
pub fn oracle_expectation<S>(budget: &EnumerationBudget, statistic: S) -> f64
where
    S: Fn(&Graph) -> f64 + Sync,
{
    budget.fold(
        0,
        |acc: &mut f64, g, w| *acc += w * statistic(g),
        |a, b| a + b,
    )
}

/// Total probability mass; 1 up to rounding.
pub fn total_mass(budget: &EnumerationBudget) -> f64 {
    oracle_expectation(budget, |_| 1.0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OracleMoments {
    pub e_tx: f64,
    pub e_t1: f64,
    pub e_txt1: f64,
    pub cov: f64,
}

/// `E[T_X]`, `E[T_1]`, `E[T_X T_1]` and `Cov(T_X, T_1)`.
///
/// The covariance is taken as `E[(T_X - E T_X)(T_1 - E T_1)]` in a second pass
/// rather than as `E[T_X T_1] - E[T_X] E[T_1]`, which cancels badly for p near 1.
pub fn oracle_moments(budget: &EnumerationBudget, f: &VertexFunction) -> OracleMoments {
    let [e_tx, e_t1, e_txt1] = budget.fold(
        0,
        |acc: &mut [f64; 3], g, w| {
            let t = topo_index(g, f);
            let t1 = t.edge_count as f64;
            acc[0] += w * t.value;
            acc[1] += w * t1;
            acc[2] += w * t.value * t1;
        },
        |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]],
    );
    let cov = budget.fold(
        0,
        |acc: &mut f64, g, w| {
            let t = topo_index(g, f);
            *acc += w * (t.value - e_tx) * (t.edge_count as f64 - e_t1);
        },
        |a, b| a + b,
    );
    OracleMoments {
        e_tx,
        e_t1,
        e_txt1,
        cov,
    }
}

pub fn oracle_cov(budget: &EnumerationBudget, f: &VertexFunction) -> f64 {
    oracle_moments(budget, f).cov
}

/// `E[f(deg 0) | {0,1}, ..., {0,k} are edges]`, by filtering to graphs that
/// contain those edges and renormalising.
pub fn oracle_dfk(budget: &EnumerationBudget, f: &VertexFunction, k: usize) -> Result<f64> {
    let n = budget.n();
    if k == 0 || k + 1 > n {
        return Err(Error::Param(format!("d_f(k) needs 1 <= k <= n - 1, got k = {k}, n = {n}")));
    }
    let required = (1..=k).fold(0u64, |m, v| m | 1 << budget.pair_index(0, v));
    let [num, den] = budget.fold(
        required,
        |acc: &mut [f64; 2], g, w| {
            acc[0] += w * f.eval(g.degree(0));
            acc[1] += w;
        },
        |a, b| [a[0] + b[0], a[1] + b[1]],
    );
    Ok(num / den)
}

/// Largest `|P(deg 0 = a, deg 1 = b) - P(deg 0 = a) P(deg 1 = b)|` under the law
/// conditioned on the edge `{0, 1}` being present. The two degrees are
/// independent given that edge, so this is 0 up to rounding.
pub fn independence_check(budget: &EnumerationBudget) -> Result<f64> {
    degree_dependence(budget, true)
}

/// The same deviation without conditioning on `{0, 1}`; positive for `0 < p < 1`.
pub fn independence_check_unconditioned(budget: &EnumerationBudget) -> Result<f64> {
    degree_dependence(budget, false)
}

fn degree_dependence(budget: &EnumerationBudget, conditioned: bool) -> Result<f64> {
    let n = budget.n();
    if n > MAX_INDEPENDENCE_N {
        return Err(Error::Budget {
            n,
            max: MAX_INDEPENDENCE_N,
        });
    }
    if n < 2 {
        return Err(Error::Param("independence check needs n >= 2".into()));
    }
    let required = if conditioned {
        1u64 << budget.pair_index(0, 1)
    } else {
        0
    };
    let joint: Vec<Vec<f64>> = budget.fold(
        required,
        |acc: &mut Vec<Vec<f64>>, g, w| {
            if acc.is_empty() {
                *acc = vec![vec![0.0; n]; n];
            }
            acc[g.degree(0)][g.degree(1)] += w;
        },
        |a, b| match (a.is_empty(), b.is_empty()) {
            (true, _) => b,
            (_, true) => a,
            _ => a
                .iter()
                .zip(&b)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
                .collect(),
        },
    );
    if joint.is_empty() {
        // no graph carries positive mass (p = 0 with conditioning)
        return Ok(0.0);
    }
    let mass: f64 = joint.iter().flatten().sum();
    let row: Vec<f64> = joint.iter().map(|r| r.iter().sum::<f64>() / mass).collect();
    let col: Vec<f64> = (0..n)
        .map(|b| joint.iter().map(|r| r[b]).sum::<f64>() / mass)
        .collect();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in 0..n {
            worst = worst.max((joint[a][b] / mass - row[a] * col[b]).abs());
        }
    }
    Ok(worst)
}
