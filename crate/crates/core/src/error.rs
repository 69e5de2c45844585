use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty set")]
    EmptySet,

    #[error("duplicate element {0:?}")]
    Duplicate(Vec<i64>),

    #[error("point {point:?} has {got} coordinates, expected {rank}")]
    RankMismatch {
        rank: usize,
        got: usize,
        point: Vec<i64>,
    },

    #[error("rank must be at least {min}, got {got}")]
    RankTooSmall { min: usize, got: usize },

    #[error("axis {axis} out of range for rank {rank}")]
    AxisOutOfRange { axis: usize, rank: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("hypothesis `{name}` violated: {detail}")]
    Hypothesis { name: String, detail: String },

    #[error("frequency at position {index} is not supported on the block structure: {detail}")]
    Support { index: i64, detail: String },

    #[error("grid of {got} samples on axis {axis} aliases a polynomial of width {width} (need at least {needed})")]
    Aliasing {
        axis: usize,
        got: usize,
        needed: usize,
        width: u64,
    },

    #[error("grid {grid:?} needs {bytes} bytes, budget is {budget} bytes")]
    Resource {
        grid: Vec<usize>,
        bytes: u128,
        budget: u64,
    },

    #[error("64-bit overflow while computing {0}")]
    Overflow(String),

    #[error("collisions in generalized progression: {0:?}")]
    Collision(Vec<((i64, i64), (i64, i64))>),
}

impl Error {
    pub(crate) fn hypothesis(name: &str, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            name: name.to_string(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
