use thiserror::Error;

/// Errors raised by the geometry, sampling and label-algebra layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("order violated: {0}")]
    OrderViolation(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("intensity must be positive and finite, got {0}")]
    NonPositiveIntensity(f64),

    #[error("invalid Levy measure: {0}")]
    InvalidLevyMeasure(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("vector {0:?} is not aligned with the grid lattice")]
    NonLatticeShift(Vec<f64>),

    #[error("cell {cell} straddles the boundary of the requested region")]
    StraddlingCell { cell: usize },

    #[error("shifted support leaves the grid window (cell {cell} moved off-grid)")]
    SupportOverflow { cell: usize },

    #[error("label is not supported in the fiber region: cell {cell} carries a nonzero value")]
    SupportViolation { cell: usize },

    #[error("fiber mismatch: expected {expected:?}, got {got:?}")]
    FiberMismatch { expected: Vec<i64>, got: Vec<i64> },

    #[error("label value equals -1 at cell {cell}")]
    MinusOneValue { cell: usize },

    #[error("negative value {value} at cell {cell} where a nonnegative function is required")]
    NegativeValue { cell: usize, value: f64 },

    #[error("parameter must be positive, got {0}")]
    NonPositiveParameter(f64),

    #[error("duplicate probe value {0}")]
    DuplicateProbe(f64),

    #[error("need at least {needed} probes, got {got}")]
    TooFewProbes { needed: usize, got: usize },

    #[error("Monte Carlo needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("worker pool: {0}")]
    WorkerPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
