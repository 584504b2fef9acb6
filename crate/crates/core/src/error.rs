use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid function spec `{spec}`: {msg}")]
    FunctionSpec { spec: String, msg: String },

    #[error("function `{0}` is not O(d); pass an explicit term cap to evaluate its Poisson series")]
    NotGrowthBounded(String),

    #[error("series did not converge within {terms} terms (last term magnitude {last_term:e})")]
    Truncation { terms: usize, last_term: f64 },

    #[error("enumeration over n = {n} vertices exceeds the budget of n <= {max}")]
    Budget { n: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
