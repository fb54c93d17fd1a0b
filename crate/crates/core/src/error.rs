use thiserror::Error;

use crate::book::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid book: {0}")]
    InvalidBook(ValidationReport),

    #[error("{what} exceeds cap: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: u64,
        actual: u64,
    },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("no image given for generator `{0}`")]
    MissingGenerator(String),

    #[error("generator images do not define a homomorphism: relator {0} is not sent to the identity")]
    NotHomomorphism(usize),

    #[error("{what} index {index} out of range (< {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("tower levels {level} and {next} are not nested: {reason}")]
    NotNested { level: usize, next: usize, reason: String },

    #[error("A^n - I is singular (torsion not full-rank)")]
    Singular,

    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
