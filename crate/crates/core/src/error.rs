use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested instance is too large for every available strategy.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An iterative method stopped before meeting its tolerance.
    #[error("no convergence after {iterations} iterations (last estimates {previous:e}, {last:e})")]
    NoConvergence {
        iterations: usize,
        previous: f64,
        last: f64,
    },

    /// A checked identity or inequality failed.
    #[error("{identity} violated at state {witness:?}: residual {residual:e} > tolerance {tolerance:e}")]
    Violation {
        identity: String,
        witness: Option<u64>,
        residual: f64,
        tolerance: f64,
    },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
