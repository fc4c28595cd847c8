use thiserror::Error;

/// Errors produced by the geometry, space and modulus routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BpbError {
    #[error("degenerate polytope: {0}")]
    DegeneratePolytope(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid face id {0}")]
    InvalidFace(usize),
    #[error("zero vector has no supporting functional")]
    ZeroVector,
    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),
    #[error("unknown space `{0}`")]
    UnknownSpace(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("search budget too small: no feasible start found")]
    BudgetTooSmall,
    #[error("linear program failed: {0}")]
    Lp(String),
}

pub type Result<T, E = BpbError> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(BpbError::DimensionMismatch { expected, found })
    }
}
