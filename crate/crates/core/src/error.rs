use thiserror::Error;

/// Errors raised by the hashing, estimation and theory layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("support indices must be strictly increasing")]
    UnsortedSupport,

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("similarity undefined: both vectors are empty")]
    EmptyUnion,

    #[error("vector has no non-zero entries")]
    EmptyVector,

    #[error("infeasible pair profile: dim={dim}, union={union}, intersection={intersection}")]
    InfeasibleProfile {
        dim: usize,
        union: usize,
        intersection: usize,
    },

    #[error("corpus contains no documents")]
    EmptyCorpus,

    #[error("table of length {0} is not a permutation")]
    NotAPermutation(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sketch mismatch: {0}")]
    SketchMismatch(String),

    #[error("no slot is non-empty in either sketch")]
    NoUsableSlots,

    #[error("variance hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no placement has exactly {m} non-empty bins")]
    InfeasibleBinCount { m: usize },

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
