use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("record {record}: {message}")]
    Parse { record: usize, message: String },

    #[error("dimension mismatch{}: expected {expected}, found {found}", fmt_record(*record))]
    DimensionMismatch {
        record: Option<usize>,
        expected: usize,
        found: usize,
    },

    #[error("record {record}: non-finite value in column {column}")]
    NonFinite { record: usize, column: usize },

    #[error("record {record}: duplicate id {id:?}")]
    DuplicateId { record: usize, id: String },

    #[error("record {record}: label {label} out of range (n_categories = {n_categories})")]
    LabelOutOfRange {
        record: usize,
        label: usize,
        n_categories: usize,
    },

    #[error("category {category} has no typical members")]
    NoTypicalMembers { category: usize },

    #[error("unknown category {0}")]
    UnknownCategory(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn fmt_record(record: Option<usize>) -> String {
    match record {
        Some(r) => format!(" in record {r}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            record: None,
            expected,
            found,
        }
    }

    /// True for errors caused by the filesystem rather than by the content of
    /// the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::File { .. })
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::dims(expected, found))
    }
}
