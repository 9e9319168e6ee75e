use thiserror::Error;

/// Errors produced by the core crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent n = {n} outside supported range 1..={max}")]
    ExponentOutOfRange { n: u32, max: u32 },
    #[error("index {index} outside 1..={universe}")]
    IndexOutOfRange { index: usize, universe: usize },
    #[error("duplicate index {0}")]
    DuplicateIndex(usize),
    #[error("universe size mismatch: {left} vs {right}")]
    UniverseMismatch { left: usize, right: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not lower triangular")]
    NotLowerTriangular,
    #[error("singular matrix: zero pivot at row {0}")]
    Singular(usize),
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("information length K = {k} invalid for N = {n}")]
    InvalidInfoLength { k: usize, n: usize },
    #[error("unknown construction method `{0}`")]
    UnknownMethod(alloc::string::String),
    #[error("design Eb/N0 must be finite")]
    NonFiniteDesignPoint,
    #[error("reliability order invalid: {0}")]
    InvalidReliabilityOrder(alloc::string::String),
    #[error("invalid code spec: {0}")]
    InvalidCodeSpec(&'static str),
    #[error("invalid pilot plan: {0}")]
    InvalidPlan(alloc::string::String),
    #[error("cannot place {requested} pilots: at most {available} available")]
    TooManyPilots { requested: usize, available: usize },
    #[error("EPS needs at least |D_f| = {required} pilots, got {requested}")]
    TooFewPilots { requested: usize, required: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(&'static str),
    #[error("covariance not positive definite at pivot {0}")]
    NotPositiveDefinite(usize),
    #[error("channel estimation needs at least one pilot")]
    NoPilots,
    #[error("pilot symbol must be nonzero")]
    ZeroPilotSymbol,
    #[error("noise variance must be positive")]
    NonPositiveNoise,
    #[error("pilot spacing infeasible: {pilots} pilots into {n} coded symbols")]
    SpacingInfeasible { pilots: usize, n: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
