use thiserror::Error;

/// Errors raised by the geometry, bounding and search routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VeinError {
    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("input contains non-finite values")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("points do not span a full-dimensional hull")]
    DegenerateHull,

    #[error("origin is not interior to the polytope (facet offset {offset:e})")]
    OriginNotInterior { offset: f64 },

    #[error("points do not span R^{dim}")]
    RankDeficient { dim: usize },

    #[error("Monte Carlo volume unreliable: relative standard error {rel_se:.4} exceeds 5%")]
    MonteCarloUnreliable { rel_se: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("containment of the cross-polytope could not be verified")]
    ContainmentUnverified,

    #[error("inequality violated: {0}")]
    InequalityViolated(String),

    #[error("{n} vertices cannot enclose a full-dimensional body in R^{dim}")]
    InfeasibleVertexCount { n: usize, dim: usize },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, VeinError>;
