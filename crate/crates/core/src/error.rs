use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Structurally invalid copula expression (weights, block layout, shuffle data).
    #[error("invalid copula expression: {0}")]
    InvalidExpression(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The expression has no shuffle-of-M normal form.
    #[error("not a shuffle of M: {0}")]
    NotAShuffle(String),

    /// No closed form applies; callers fall back to the oracle estimators.
    #[error("not computable exactly: {0}")]
    NotComputableExactly(String),

    #[error("point outside the region: violates {constraint}")]
    OutOfRegion { constraint: String },

    #[error("point is not on face {face}: {detail}")]
    OutOfFace { face: String, detail: String },

    /// A construction that must succeed for valid input did not.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
