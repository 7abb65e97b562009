use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Mathematical *failures* (an axiom that does not hold, a non-monotone
/// sample) are reported inside the corresponding report types; the variants
/// here are reserved for malformed input and for computations that cannot
/// produce a meaningful answer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("effective domain is empty: {0}")]
    DomainEmpty(String),

    #[error("point outside the effective domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("function is not convex on the grid: {0}")]
    Convexity(String),

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("sample too large: {len} pairs exceed the limit of {limit}")]
    Size { len: usize, limit: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("sample is not a BB-graph: {0}")]
    BBGraph(String),

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("sampling error: {0}")]
    Sampling(String),

    #[error("no resolution found: best gap {best_gap:e} exceeds tolerance {tol:e}")]
    NoResolution { best_gap: f64, tol: f64 },

    #[error("axiom violated: {0}")]
    AxiomViolation(String),

    #[error("0 * (+inf) is undefined")]
    ZeroTimesInfinity,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
