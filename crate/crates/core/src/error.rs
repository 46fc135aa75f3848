use thiserror::Error;

/// Errors reported by the hashing pipeline and the verification engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported output width {0} bytes (expected 16, 24, 32 or 40)")]
    UnsupportedWidth(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("NH input has odd length {0}; inputs are sequences of half-word pairs")]
    OddLength(usize),

    #[error("NH input of {len} half-words is too short (need at least {min})")]
    InputTooShort { len: usize, min: usize },

    #[error("NH seed of {seed} half-words is shorter than the {needed} required")]
    SeedTooShort { seed: usize, needed: usize },

    #[error("expected {expected} blocks, got {actual}")]
    WrongBlockCount { expected: usize, actual: usize },

    #[error("tree reduction needs at least one block")]
    EmptyStream,

    #[error("seed buffer holds {available} tree levels but this input needs {needed}")]
    SeedTooSmall { available: usize, needed: usize },

    #[error("seed buffer was expanded for a different parameter set")]
    SeedLayoutMismatch,

    #[error("columns {columns:?} of the combine matrix have zero determinant")]
    SingularSubset { columns: Vec<usize> },

    #[error("erasure code declares minimum distance {declared} but {measured} was measured")]
    DistanceDeficient { declared: usize, measured: usize },

    #[error("exhaustive enumeration over 2^{bits} points exceeds the limit of 2^{limit}")]
    EnumerationTooLarge { bits: u32, limit: u32 },

    #[error("test vector line {line}: {reason}")]
    VectorFormat { line: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
