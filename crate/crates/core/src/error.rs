use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("constraint coefficients must be nonempty and all >= 1")]
    InvalidCoefficients,
    #[error("coefficient value {kappa} appears {found} time(s), at least {required} required")]
    SequentialityViolation { kappa: u32, required: usize, found: usize },
    #[error("warm start has constraint value {got}, expected {expected}")]
    InfeasibleWarmStart { got: u64, expected: u64 },
    #[error("instance has no warm start solution")]
    MissingWarmStart,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("feasible set is empty")]
    EmptyFeasibleSet,
    #[error("instance with {n} variables exceeds the limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("merge operator needs nonempty sources and a target outside them")]
    MalformedMerge,
    #[error("merge coefficient mismatch: sources sum to {sources}, target has {target}")]
    CoefficientMismatch { sources: u64, target: u64 },
    #[error("mu = {mu} would drop operators of the minimal family")]
    MuTooSmall { mu: usize },
    #[error("exhaustive check over 2^{n} states exceeds the limit 2^{limit}; use subspace-only mode")]
    TooLargeForExhaustive { n: usize, limit: usize },
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("subspace dimension {dim} exceeds dense cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },
    #[error("mismatched dimensions: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("Chebyshev argument {0} outside [-1, 1]")]
    DomainError(f64),
    #[error("negative mixer coefficient beta({s}) = {beta}")]
    NegativeBeta { s: f64, beta: f64 },
    #[error("gap collapse at s = {s}: E1 - E0 = {gap:e}")]
    GapCollapse { s: f64, gap: f64 },
    #[error("schedule triple sums to {0}, below the normalization floor")]
    NormalizationFloor(f64),
    #[error("invalid angle set: {0}")]
    InvalidAngles(String),
    #[error("unknown format: {0}")]
    UnknownFormat(String),
    #[error("parse error: {0}")]
    Parse(String),
}
