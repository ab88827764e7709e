//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A factorization pivot or Schur scalar came out non-positive.
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Operation needs at least a 2x2 matrix.
    #[error("dimension too small: operation requires p >= 2")]
    DimensionTooSmall,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// All off-diagonal entries are zero, so no penalty grid can be built.
    #[error("degenerate matrix: largest off-diagonal magnitude is zero")]
    DegenerateMatrix,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
