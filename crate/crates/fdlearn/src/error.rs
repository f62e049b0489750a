//! Error types shared across the pipeline.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix not positive definite ({0})")]
    NotPositiveDefinite(&'static str),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("schema mismatch between dependency sets")]
    SchemaMismatch,

    #[error("dependency parse error at line {line}: {msg}")]
    FdParse { line: usize, msg: String },
}

impl Error {
    /// Process exit code for CLI use: 1 usage, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 1,
            Error::Io { .. }
            | Error::Csv(_)
            | Error::EmptyInput(_)
            | Error::RaggedRow { .. }
            | Error::DuplicateAttribute(_)
            | Error::InvalidDataset(_)
            | Error::SchemaMismatch
            | Error::FdParse { .. } => 2,
            Error::NotPositiveDefinite(_) | Error::NonFinite(_) => 3,
        }
    }
}
