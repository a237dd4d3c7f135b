use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not alternating (symmetric with zero diagonal): {0}")]
    NotAlternating(String),

    #[error("illegal move: {0}")]
    InvalidMove(String),

    #[error("{what} exceeds limit: requested {requested}, limit {limit}")]
    LimitExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("input does not match the required pattern: {0}")]
    PatternViolation(String),

    #[error("finite universe exhausted: {0}")]
    ResourceExhausted(String),

    #[error("operator is not unitary within tolerance (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("power iteration did not converge after {0} iterations")]
    NormDiverged(usize),

    #[error("word commutes with the chosen generator")]
    CommutingWord,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
