use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} outside heap of size {heap_size}")]
    InvalidIndex { index: usize, heap_size: usize },

    #[error("operation requires a non-empty heap")]
    EmptyHeap,

    #[error("operation requires a non-empty queue")]
    EmptyQueue,

    #[error("cannot join binomial trees of sizes {left} and {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("adversarial heap needs exponent k >= 2, got {0}")]
    ExponentTooSmall(u32),

    #[error("red range [{lo}, {lo}+{len}) does not fit in {n} keys")]
    InvalidRedRange { lo: usize, len: usize, n: usize },

    #[error("duplicate string in corpus: {0:?}")]
    DuplicateString(String),

    #[error("empty line {line} in corpus")]
    EmptyCorpusLine { line: usize },

    #[error("{what} = {got} exceeds the exhaustive limit of {cap}")]
    TooLarge {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
