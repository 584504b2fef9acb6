//! Closed-form moments of `T_X` and `T_1` under `G(n, p)`.
//!
//! Everything is driven by the conditional degree moment
//!
//! ```text
//! d_f(k) = E[f(deg v) | v has k prescribed neighbours] = E[f(k + Bin(n-k-1, p))]
//! ```
//!
//! and its `n -> ∞` limit `E[f(k + Poisson(alpha))]` at `p = alpha / n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::ModelParams;
use crate::vfunc::VertexFunction;

/// Term cap for the Poisson series when the caller does not set one.
pub const DEFAULT_MAX_TERMS: usize = 10_000;

/// Truncation control for the Poisson-limit series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Absolute bound on the neglected tail. Also the threshold below which
    /// `|d_f(1)|` is treated as zero.
    pub tol: f64,
    /// Explicit term cap. Required for functions that are not `O(d)`; for those
    /// exactly this many terms are summed.
    pub max_terms: Option<usize>,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_terms: None,
        }
    }
}

impl SeriesControl {
    pub fn new(tol: f64, max_terms: Option<usize>) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Param(format!("series tolerance must be positive, got {tol}")));
        }
        if max_terms == Some(0) {
            return Err(Error::Param("max_terms must be at least 1".into()));
        }
        Ok(Self { tol, max_terms })
    }
}

/// Unnormalised `Binomial(m, p)` weights, scaled so the largest is 1.
///
/// Log-weights are accumulated from `j = 0` through the ratio
/// `w_{j+1} / w_j = (m - j) / (j + 1) * p / (1 - p)`; no factorial ever
/// materialises, so `m` in the millions is fine.
fn binomial_weights(m: usize, p: f64) -> Vec<f64> {
    if p <= 0.0 {
        let mut w = vec![0.0; m + 1];
        w[0] = 1.0;
        return w;
    }
    if p >= 1.0 {
        let mut w = vec![0.0; m + 1];
        w[m] = 1.0;
        return w;
    }
    let log_odds = p.ln() - (-p).ln_1p();
    let mut logs = Vec::with_capacity(m + 1);
    let mut l = m as f64 * (-p).ln_1p();
    logs.push(l);
    for j in 0..m {
        l += ((m - j) as f64).ln() - ((j + 1) as f64).ln() + log_odds;
        logs.push(l);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    logs.into_iter().map(|l| (l - top).exp()).collect()
}

/// `d_f(k)` at finite `n`: `E[f(k + Bin(n - k - 1, p))]`.
pub fn dfk_exact(f: &VertexFunction, params: &ModelParams, k: usize) -> Result<f64> {
    let n = params.n();
    if k == 0 || k + 1 > n {
        return Err(Error::Param(format!("d_f(k) needs 1 <= k <= n - 1, got k = {k}, n = {n}")));
    }
    if let VertexFunction::Shifted(base, c) = f {
        // the weights are normalised, so a shift passes straight through
        return Ok(dfk_exact(base, params, k)? - c);
    }
    let weights = binomial_weights(n - k - 1, params.p());
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, w) in weights.iter().enumerate() {
        num += f.eval(k + j) * w;
        den += w;
    }
    Ok(num / den)
}

/// `lim_{n→∞} d_f(k) = E[f(k + Poisson(alpha))]`.
///
/// For `O(d)` functions with constant `C`, summation stops once the tail bound
/// `C (k+j+1) r_{j+1} / (1 - q)` drops to `ctl.tol`, where `r_j` is the Poisson
/// mass at `j` and `q = alpha (k+j+2) / ((j+2)(k+j+1))` dominates every later
/// ratio of consecutive tail terms.
pub fn dfk_poisson(f: &VertexFunction, alpha: f64, k: usize, ctl: &SeriesControl) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Param(format!("alpha must be positive, got {alpha}")));
    }
    if k == 0 {
        return Err(Error::Param("d_f(k) needs k >= 1".into()));
    }
    if let VertexFunction::Shifted(base, c) = f {
        return Ok(dfk_poisson(base, alpha, k, ctl)? - c);
    }

    let ln_alpha = alpha.ln();
    let mass = |ln_r: f64| ln_r.exp();

    let Some(growth) = f.growth_constant() else {
        let terms = ctl
            .max_terms
            .ok_or_else(|| Error::NotGrowthBounded(f.to_string()))?;
        let mut ln_r = -alpha;
        let mut sum = 0.0;
        for j in 0..terms {
            sum += f.eval(k + j) * mass(ln_r);
            ln_r += ln_alpha - ((j + 1) as f64).ln();
        }
        return Ok(sum);
    };

    let cap = ctl.max_terms.unwrap_or(DEFAULT_MAX_TERMS);
    let mut ln_r = -alpha;
    let mut sum = 0.0;
    let mut last_term = f64::INFINITY;
    for j in 0..cap {
        let term = f.eval(k + j) * mass(ln_r);
        sum += term;
        last_term = term.abs();
        ln_r += ln_alpha - ((j + 1) as f64).ln();

        let jf = j as f64;
        let kf = k as f64;
        let q = alpha * (kf + jf + 2.0) / ((jf + 2.0) * (kf + jf + 1.0));
        if q < 1.0 {
            let tail = growth * (kf + jf + 1.0) * mass(ln_r) / (1.0 - q);
            if tail <= ctl.tol {
                return Ok(sum);
            }
        }
    }
    Err(Error::Truncation {
        terms: cap,
        last_term,
    })
}

/// `E[T_X] = d_f(1)^2 E[|E|]`.
pub fn expected_index(f: &VertexFunction, params: &ModelParams) -> Result<f64> {
    require_pair(params)?;
    let d1 = dfk_exact(f, params, 1)?;
    Ok(d1 * d1 * params.expected_edges())
}

/// `E[T_X T_1] = [d1^2 C(n-2,2) p + 2 d1 d2 (n-2) p + d1^2] E[|E|]`.
pub fn expected_product(f: &VertexFunction, params: &ModelParams) -> Result<f64> {
    require_pair(params)?;
    let (d1, d2) = d1_d2(f, params)?;
    let n = params.n() as f64;
    let p = params.p();
    let disjoint = d1 * d1 * (n - 2.0) * (n - 3.0) / 2.0 * p;
    let shared = 2.0 * d1 * d2.unwrap_or(0.0) * (n - 2.0) * p;
    Ok((disjoint + shared + d1 * d1) * params.expected_edges())
}

/// Numbers of index quadruples `(u, v, u', v')` with `u < v`, `u' < v'` whose
/// pairs share 0, 1 or 2 vertices: `C(n,2) C(n-2,2)`, `6 C(n,3)`, `C(n,2)`.
pub fn s_counts(n: u64) -> (u64, u64, u64) {
    let c2 = |m: u64| m * m.saturating_sub(1) / 2;
    let c3 = |m: u64| {
        if m < 3 {
            0
        } else {
            m * (m - 1) * (m - 2) / 6
        }
    };
    (c2(n) * c2(n.saturating_sub(2)), 6 * c3(n), c2(n))
}

/// `Cov(T_X, T_1)` at finite `n`.
///
/// The bracket `d1^2 (1 + (3-2n) p) + 2 d1 d2 (n-2) p` is evaluated in the
/// equivalent form `d1^2 (1-p) + 2 (n-2) p d1 (d2 - d1)`, which avoids the
/// O(n p) cancellation between its first two terms.
pub fn covariance_exact(f: &VertexFunction, params: &ModelParams) -> Result<f64> {
    require_pair(params)?;
    let (d1, d2) = d1_d2(f, params)?;
    let n = params.n() as f64;
    let p = params.p();
    let bracket = d1 * d1 * (1.0 - p) + 2.0 * (n - 2.0) * p * d1 * (d2.unwrap_or(0.0) - d1);
    // d1 = 0 gives 0 exactly; normalise the sign of zero
    Ok(bracket * params.expected_edges() + 0.0)
}

/// The limit of `Cov(T_X, T_1) / E[|E|]`, or the zero branch when `d_f(1)`
/// vanishes in the limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AsymptoticCoeff {
    Value(f64),
    ZeroBranch,
}

impl AsymptoticCoeff {
    /// The coefficient, with the zero branch read as `0`.
    pub fn value(self) -> f64 {
        match self {
            Self::Value(v) => v,
            Self::ZeroBranch => 0.0,
        }
    }
}

/// `d1^2 (1 + 2 alpha (d2 / d1 - 1))` with Poisson-limit `d1`, `d2`.
pub fn covariance_asymptotic_coeff(
    f: &VertexFunction,
    alpha: f64,
    ctl: &SeriesControl,
) -> Result<AsymptoticCoeff> {
    let d1 = dfk_poisson(f, alpha, 1, ctl)?;
    if d1.abs() <= ctl.tol {
        return Ok(AsymptoticCoeff::ZeroBranch);
    }
    let d2 = dfk_poisson(f, alpha, 2, ctl)?;
    Ok(AsymptoticCoeff::Value(d1 * d1 * (1.0 + 2.0 * alpha * (d2 / d1 - 1.0))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCovWitness {
    /// Whether `Cov(T_X, T_1)` vanishes asymptotically.
    pub zero: bool,
    /// The Poisson-limit `d_f(1)` the decision was made on.
    pub d1: f64,
}

/// The covariance vanishes in the limit iff the limiting `d_f(1)` does.
pub fn zero_cov_test(f: &VertexFunction, alpha: f64, ctl: &SeriesControl) -> Result<ZeroCovWitness> {
    let d1 = dfk_poisson(f, alpha, 1, ctl)?;
    Ok(ZeroCovWitness {
        zero: d1.abs() <= ctl.tol,
        d1,
    })
}

/// Coefficients of the power series in `alpha` whose vanishing is equivalent to
/// zero asymptotic covariance: `c_0 = f(1) / 2` and
/// `c_j = f(j+1) (1 + 1/(2j)) - f(j)` for `1 <= j <= j_max`.
///
/// The series is `c_0 + Σ_{j≥1} c_j alpha^j / (j-1)!`.
pub fn cov0_coefficients(f: &VertexFunction, j_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(j_max + 1);
    out.push(0.5 * f.eval(1));
    for j in 1..=j_max {
        let jf = j as f64;
        out.push(f.eval(j + 1) * (1.0 + 1.0 / (2.0 * jf)) - f.eval(j));
    }
    out
}

/// Inverts [`cov0_coefficients`] by forward substitution, returning
/// `f(1), ..., f(j_max + 1)`.
pub fn values_from_cov0_coefficients(coeffs: &[f64]) -> Vec<f64> {
    let Some((&c0, rest)) = coeffs.split_first() else {
        return Vec::new();
    };
    let mut values = vec![2.0 * c0];
    for (i, c) in rest.iter().enumerate() {
        let j = (i + 1) as f64;
        let prev = values[i];
        values.push((c + prev) / (1.0 + 1.0 / (2.0 * j)));
    }
    values
}

/// Every closed-form quantity for one `(f, n, p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub d1: f64,
    /// `None` for `n = 2`, where no vertex can have two neighbours.
    pub d2: Option<f64>,
    pub d1_poisson: f64,
    pub d2_poisson: f64,
    pub expected_edges: f64,
    pub e_tx: f64,
    pub e_txt1: f64,
    pub cov_exact: f64,
    pub cov_asymptotic_coeff: AsymptoticCoeff,
}

impl MomentReport {
    pub fn compute(f: &VertexFunction, params: &ModelParams, ctl: &SeriesControl) -> Result<Self> {
        require_pair(params)?;
        let (d1, d2) = d1_d2(f, params)?;
        let alpha = params.alpha();
        Ok(Self {
            d1,
            d2,
            d1_poisson: dfk_poisson(f, alpha, 1, ctl)?,
            d2_poisson: dfk_poisson(f, alpha, 2, ctl)?,
            expected_edges: params.expected_edges(),
            e_tx: expected_index(f, params)?,
            e_txt1: expected_product(f, params)?,
            cov_exact: covariance_exact(f, params)?,
            cov_asymptotic_coeff: covariance_asymptotic_coeff(f, alpha, ctl)?,
        })
    }
}

fn require_pair(params: &ModelParams) -> Result<()> {
    if params.n() < 2 {
        return Err(Error::Param(format!("need n >= 2, got {}", params.n())));
    }
    Ok(())
}

fn d1_d2(f: &VertexFunction, params: &ModelParams) -> Result<(f64, Option<f64>)> {
    let d1 = dfk_exact(f, params, 1)?;
    let d2 = if params.n() >= 3 {
        Some(dfk_exact(f, params, 2)?)
    } else {
        None
    };
    Ok((d1, d2))
}
