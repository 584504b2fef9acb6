//! Vertex-degree functions `f: N_0 -> R` with the convention `f(0) = 0`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Exponent of the Randić connectivity index, `f(d) = d^(-1/2)`.
pub const RANDIC_EXPONENT: f64 = -0.5;

/// A function of a vertex degree.
///
/// Every kind evaluates to `0` at degree `0`, so isolated vertices never
/// contribute. That includes [`VertexFunction::Shifted`], whose value at `0`
/// stays `0` rather than `-c`.
#[derive(Debug, Clone, PartialEq)]
pub enum VertexFunction {
    /// `c` for every `d >= 1`.
    Constant(f64),
    /// `d`.
    Identity,
    /// `d^lambda`; `lambda = -1/2` is the Randić index.
    Power(f64),
    /// `values[d - 1]` for `1 <= d <= len`, extended linearly through the last
    /// two entries (constantly if there is only one).
    Table(Vec<f64>),
    /// `base(d) - c` for `d >= 1`.
    Shifted(Box<VertexFunction>, f64),
}

impl VertexFunction {
    pub fn randic() -> Self {
        Self::Power(RANDIC_EXPONENT)
    }

    pub fn zero() -> Self {
        Self::Constant(0.0)
    }

    /// The function that is `1` on every positive degree; its index is the edge count.
    pub fn one() -> Self {
        Self::Constant(1.0)
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::FunctionSpec {
                spec: "table:".into(),
                msg: "table needs at least one value".into(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::FunctionSpec {
                spec: format!("table:{bad}"),
                msg: "table values must be finite".into(),
            });
        }
        Ok(Self::Table(values))
    }

    pub fn eval(&self, d: usize) -> f64 {
        if d == 0 {
            return 0.0;
        }
        match self {
            Self::Constant(c) => *c,
            Self::Identity => d as f64,
            Self::Power(lambda) => (d as f64).powf(*lambda),
            Self::Table(values) => table_eval(values, d),
            Self::Shifted(base, c) => base.eval(d) - c,
        }
    }

    /// `g(d) = f(d) - c` for `d >= 1`, `g(0) = 0`.
    pub fn shift(&self, c: f64) -> Self {
        Self::Shifted(Box::new(self.clone()), c)
    }

    /// A constant `C` with `|f(d)| <= C d` for all `d >= 1`, or `None` when `f`
    /// grows faster than linearly.
    pub fn growth_constant(&self) -> Option<f64> {
        match self {
            Self::Constant(c) => Some(c.abs()),
            Self::Identity => Some(1.0),
            Self::Power(lambda) if *lambda <= 1.0 => Some(1.0),
            Self::Power(_) => None,
            Self::Table(values) => {
                let len = values.len();
                // a/d + s is monotone in d past the table, so the supremum of
                // |f(d)|/d there is attained at d = len + 1 or in the limit |s|
                let slope = table_slope(values).abs();
                let inside = (1..=len + 1)
                    .map(|d| table_eval(values, d).abs() / d as f64)
                    .fold(0.0, f64::max);
                Some(inside.max(slope))
            }
            Self::Shifted(base, c) => base.growth_constant().map(|k| k + c.abs()),
        }
    }

    pub fn is_growth_bounded(&self) -> bool {
        self.growth_constant().is_some()
    }

    /// The builtin set used throughout the test suites: `const:1`, `id`,
    /// `randic`, `pow:1`, `pow:0.5`, and a table.
    pub fn builtins() -> Vec<Self> {
        vec![
            Self::one(),
            Self::Identity,
            Self::randic(),
            Self::Power(1.0),
            Self::Power(0.5),
            Self::Table(vec![0.5, 2.0, -1.0, 3.0]),
        ]
    }
}

fn table_slope(values: &[f64]) -> f64 {
    match values {
        [.., a, b] => b - a,
        _ => 0.0,
    }
}

fn table_eval(values: &[f64], d: usize) -> f64 {
    let len = values.len();
    if d <= len {
        values[d - 1]
    } else {
        values[len - 1] + (d - len) as f64 * table_slope(values)
    }
}

impl fmt::Display for VertexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "const:{c}"),
            Self::Identity => write!(f, "id"),
            Self::Power(lambda) if *lambda == RANDIC_EXPONENT => write!(f, "randic"),
            Self::Power(lambda) => write!(f, "pow:{lambda}"),
            Self::Table(values) => {
                write!(f, "table:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            Self::Shifted(base, c) => write!(f, "shift:{base}:{c}"),
        }
    }
}

impl FromStr for VertexFunction {
    type Err = Error;

    /// Parses `const:<c>`, `id`, `randic`, `pow:<lambda>`, `table:<v1,v2,...>`
    /// and `shift:<inner>:<c>`.
    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = |msg: &str| Error::FunctionSpec {
            spec: spec.to_string(),
            msg: msg.to_string(),
        };
        let number = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(&format!("`{s}` is not a finite number")))
        };

        match spec {
            "id" => return Ok(Self::Identity),
            "randic" => return Ok(Self::randic()),
            _ => {}
        }
        if let Some(rest) = spec.strip_prefix("shift:") {
            let (inner, c) = rest
                .rsplit_once(':')
                .ok_or_else(|| bad("expected `shift:<inner>:<c>`"))?;
            return Ok(inner.parse::<Self>()?.shift(number(c)?));
        }
        if let Some(c) = spec.strip_prefix("const:") {
            return Ok(Self::Constant(number(c)?));
        }
        if let Some(lambda) = spec.strip_prefix("pow:") {
            return Ok(Self::Power(number(lambda)?));
        }
        if let Some(list) = spec.strip_prefix("table:") {
            let values = list
                .split(',')
                .map(number)
                .collect::<Result<Vec<_>>>()?;
            return Self::table(values).map_err(|_| bad("table needs at least one value"));
        }
        Err(bad("unknown function kind"))
    }
}
