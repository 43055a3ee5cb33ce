use thiserror::Error;

/// Errors raised by the numerical pipelines.
///
/// Each variant names the failing contract; the report layer attaches the
/// producing module when it propagates them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver did not converge after {iterations} iterations (last change {last_change:.3e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("truncation error: tail mass {tail_mass:.3e} exceeds {limit:.1e}")]
    Truncation { tail_mass: f64, limit: f64 },

    #[error("minimizer hit the bracket boundary at xi = {xi}")]
    Bracket { xi: f64 },

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("factorization failed at pivot {index}: {detail}")]
    Factorization { index: usize, detail: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
