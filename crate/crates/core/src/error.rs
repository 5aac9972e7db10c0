use thiserror::Error;

use crate::lattice::Point;

pub type Result<T> = std::result::Result<T, TarskiError>;

#[derive(Debug, Error)]
pub enum TarskiError {
    /// Two points or a point and a box disagree on dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {point} lies outside the box {lo}..={hi}")]
    OutOfBox { point: Point, lo: Point, hi: Point },

    /// Caller broke a precondition (empty set, bad index, cap exceeded, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// The oracle contradicts the range or monotone condition. Usually means
    /// the input function is not monotone.
    #[error("invalid instance: {0}")]
    InstanceInvalid(String),

    /// A solver broke the contract the decomposition relies on.
    #[error("solver contract violated: {0}")]
    Contract(String),

    #[error("query budget exceeded: {used} > {budget}")]
    BudgetExceeded { used: u64, budget: u64 },

    #[error("failed to load instance: {0}")]
    Load(String),

    /// Internal signal used by the decomposition to stop the outer solver as
    /// soon as a solution has been recorded. Never escapes `decompose_star`.
    #[error("search interrupted: solution already found")]
    Interrupted,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl TarskiError {
    pub fn usage(msg: impl Into<String>) -> Self {
        TarskiError::Usage(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        TarskiError::InstanceInvalid(msg.into())
    }
}
