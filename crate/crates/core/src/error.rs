use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("band {lambda} outside resolved range [{min}, {max}]")]
    Band { lambda: f64, min: f64, max: f64 },

    #[error("non-finite value in {what} at node {index} (r = {r})")]
    NonFinite { what: &'static str, index: usize, r: f64 },

    #[error("CFL violation: dt/dr = {cfl:.4} exceeds {limit}")]
    Cfl { cfl: f64, limit: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("inadmissible Strichartz pair (q = {q}, r = {r}): {violated}")]
    Inadmissible { q: f64, r: f64, violated: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
