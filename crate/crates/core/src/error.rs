use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("insufficient precision: need m >= {required}, got m = {given}")]
    Precision { required: u32, given: u32 },

    #[error("singular matrix")]
    Singular,

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("incomplete flag: {0}")]
    IncompleteFlag(String),

    #[error("not a directed edge of E1: {0}")]
    NotAnEdge(String),

    #[error("parse error at line {line}, field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("index out of range in `{field}`: {value} (limit {limit})")]
    IndexOutOfRange {
        field: String,
        value: usize,
        limit: usize,
    },

    #[error("duplicate tuple {0:?}")]
    DuplicateTuple(Vec<usize>),

    #[error("presentation failed validation: {0}")]
    Validation(String),

    #[error("unsupported scope: {0}")]
    UnsupportedScope(String),

    #[error("falsification witness: {0}")]
    Falsified(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit status: 1 for failed assertions, 2 for bad configuration
    /// or input.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Validation(_) | Error::Falsified(_) | Error::Internal(_) => 1,
            _ => 2,
        }
    }
}
