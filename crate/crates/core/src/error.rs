use thiserror::Error;

/// Errors raised by body construction and the metric operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point lies outside the open body")]
    PointOutside,

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("point is not on the boundary (off by {offset:e})")]
    NotBoundaryPoint { offset: f64 },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("frame vectors are linearly dependent")]
    DependentFrame,

    #[error("path leaves the body")]
    PathExitsBody,

    #[error("path needs at least two vertices or samples")]
    EmptyPath,

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no geodesic witness: {0}")]
    NoWitness(String),

    #[error("body is unbounded")]
    Unbounded,

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
