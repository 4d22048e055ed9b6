//! Error type shared across the crate.

use std::path::PathBuf;

/// Everything that can go wrong in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A dictionary column has (numerically) zero norm and cannot be normalized.
    #[error("column {index} has zero norm and cannot be normalized")]
    ZeroColumn { index: usize },

    /// Matrix/vector dimensions do not line up for the requested operation.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// A subset index is empty, unsorted, repeated, or out of bounds.
    #[error("invalid subset: {context}")]
    InvalidSubset { context: String },

    /// A scalar parameter is outside its documented range.
    #[error("invalid parameter: {context}")]
    InvalidParameter { context: String },

    /// An exhaustive enumeration would exceed the configured cap.
    #[error("enumeration of {required} subsets exceeds cap of {cap}")]
    EnumerationCap { required: u128, cap: u128 },

    /// A numerical routine failed to produce a usable result.
    #[error("numerical failure: {context}")]
    Numerical { context: String },

    /// An I/O operation failed.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A text file did not parse as the expected format.
    #[error("parse error in {path} at line {line}: {msg}")]
    ParseFile {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// JSON serialization or deserialization failed.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(context: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
        }
    }

    pub(crate) fn subset(context: impl Into<String>) -> Self {
        Error::InvalidSubset {
            context: context.into(),
        }
    }

    pub(crate) fn param(context: impl Into<String>) -> Self {
        Error::InvalidParameter {
            context: context.into(),
        }
    }

    pub(crate) fn numerical(context: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
