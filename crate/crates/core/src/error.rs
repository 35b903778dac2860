use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank must be at least 1 and dimension at least 1 (got rank {rank}, dim {dim})")]
    InvalidShape { rank: usize, dim: usize },

    #[error("multi-index {index:?} is invalid for a rank-{rank} tensor of dimension {dim}")]
    IndexOutOfRange {
        index: Vec<usize>,
        rank: usize,
        dim: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{what} is singular (zero determinant)")]
    Singular { what: &'static str },

    #[error("operation requires {expected}, got rank {rank}")]
    UnsupportedRank { expected: &'static str, rank: usize },

    #[error("operation requires dimension {expected}, got {dim}")]
    UnsupportedDimension { expected: usize, dim: usize },

    #[error("permutation tensor of order {order} vanishes identically in dimension {dim}")]
    OrderExceedsDimension { order: usize, dim: usize },

    #[error("dense array would hold {entries} entries, above the cap of {cap}")]
    SizeCapExceeded { entries: u128, cap: u128 },

    #[error(
        "suite {suite} supports d <= {max}, got d = {dim}: the epsilon sum enumerates (d!)^r = {cost} permutation tuples at rank {rank}"
    )]
    SuiteDimension {
        suite: &'static str,
        dim: usize,
        max: usize,
        rank: usize,
        cost: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("every sample was degenerate (s^2 = 0)")]
    AllSamplesDegenerate,
}

pub type Result<T> = std::result::Result<T, Error>;
