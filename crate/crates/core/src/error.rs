use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{what} too large for exhaustive treatment ({size} > {limit})")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
    #[error("invalid stabilizer group: {0}")]
    InvalidGroup(String),
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("operator {0} is not in the normalizer")]
    NotNormalizer(String),
    #[error("operator {0} is a stabilizer element, not a logical")]
    InStabilizer(String),
    #[error("no constant stabilizer for {0}")]
    NoConstantStabilizer(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("decoding failed: {0}")]
    Decode(String),
    #[error("nonconstant syndrome requested without guarantee: {0}")]
    Guarantee(String),
    #[error("invalid circuit: {0}")]
    Circuit(String),
    #[error("zero-probability outcome: {0}")]
    ZeroProbability(String),
    #[error("search failed: {0}")]
    Search(String),
}

pub type Result<T> = std::result::Result<T, Error>;
