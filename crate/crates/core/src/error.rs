use thiserror::Error;

/// Every failure the toolkit can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("field contains a non-finite value at node {0}")]
    NonFiniteField(usize),
    #[error("grid has {got} points on axis {axis}, at least {need} are required")]
    GridTooCoarse { axis: usize, got: usize, need: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (pivot {0:e})")]
    NotPositiveDefinite(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degree {0} outside the supported range")]
    DegreeOutOfRange(i64),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("argument {0} outside [-1, 1]")]
    ArgumentOutOfDomain(f64),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("order {0} outside the supported range")]
    OrderOutOfRange(i64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("phase unwrapping failed at node {0}")]
    UnwrapFailure(usize),
    #[error("grid box too small: {0}")]
    BoxTooSmall(String),
    #[error("test function has zero variance under the state measure")]
    DegenerateTestFunction,
    #[error("{0:.3} of the probability mass lies in masked node cells")]
    NodeDominatedState(f64),
    #[error("matrix exponential diverged (norm {0:e})")]
    ExpDivergence(f64),
    #[error("singular block matrix")]
    SingularBlock,
    #[error("operation requires a one-dimensional state, got dimension {0}")]
    WrongDimension(usize),
    #[error("classical correlations present (|Vc| = {0:e})")]
    ClassicalCorrelationsPresent(f64),
    #[error("density grids are only supported in one dimension (got {0})")]
    DimensionUnsupported(usize),
    #[error("{0:.3} of the diagonal mass lies in masked cells")]
    MaskDominated(f64),
    #[error("truncated weight {0:e} exceeds 1e-8")]
    TruncationInsufficient(f64),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
