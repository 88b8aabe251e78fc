use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("label `{0}` is already in use")]
    LabelCollision(String),

    #[error("empty subsystem selection")]
    EmptyMask,

    #[error("subsystem selections overlap")]
    OverlappingMasks,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension cap exceeded: {size} > {cap}")]
    DimensionCap { size: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("indicator rows are linearly dependent (rank {rank} < {expected})")]
    LinearDependence { rank: usize, expected: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Whether the error reports a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
