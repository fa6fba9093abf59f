use thiserror::Error;

/// Errors raised by the checkers, searchers and classifiers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("need at least two distinct points, got {0}")]
    TooFewPoints(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported root-of-unity order {0}: only p^n and p^n*q are supported")]
    UnsupportedOrder(u64),
    #[error("{0} is not a unit modulo {1}")]
    NotAUnit(i64, u64),
    #[error("not decomposable into p-cycles: {0}")]
    NotDecomposable(String),
    #[error("empty set")]
    EmptySet,
    #[error("invalid residue set: {0}")]
    InvalidResidueSet(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group mismatch")]
    GroupMismatch,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a tile: {0}")]
    NotATile(String),
    #[error("window insufficient: {0}")]
    WindowInsufficient(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("density not certified within the window")]
    DensityNotCertified,
    #[error("integral of the test function is zero")]
    ZeroIntegral,
    #[error("ball counts are not uniform at scale {0}")]
    NonUniform(i64),
    #[error("theorem violation (implementation bug): {0}")]
    TheoremViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
