use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("letter id {id} is not in an alphabet of {size} letters")]
    UnknownLetter { id: usize, size: usize },

    #[error("unknown letter label `{0}`")]
    UnknownLabel(String),

    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),

    #[error("substitution is not of constant length")]
    NotConstantLength,

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("seed `{seed}` is not prefix-stable: its image starts with `{first}`")]
    SeedNotPrefixStable { seed: String, first: String },

    #[error("letter `{0}` does not recur in the examined prefix")]
    NoReturn(String),

    #[error("height computation did not stabilise up to prefix length {0}")]
    Unstable(usize),

    #[error("substitution has height {0}; block letters to height 1 first")]
    HeightNotOne(u64),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
