use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("no unit found with y <= {0}")]
    UnitSearchCap(u64),
    #[error("basis is degenerate")]
    DegenerateBasis,
    #[error("lattice is not a fractional ideal")]
    NotIdeal,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("{0} is not totally positive")]
    NotTotallyPositive(String),
    #[error("period not found within {0} steps")]
    PeriodCap(usize),
    #[error("no narrow class with index {0}")]
    NoSuchClass(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("weights ({0}, {1}) differ in parity")]
    WeightParity(i64, i64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("key {0} does not lie in the dual lattice")]
    KeyOutsideLattice(String),
    #[error("conflicting coefficients for orbit of {0}")]
    ConflictingCoefficient(String),
    #[error("coefficient at {1} has denominator divisible by {0}")]
    DenominatorNotUnit(u64, String),
    #[error("invalid input: {0}")]
    Input(String),
}
