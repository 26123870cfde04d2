use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration or sequence document problem, located by key path.
    #[error("{key}: {message}")]
    Document { key: String, message: String },

    #[error(transparent)]
    Model(#[from] nvinit_core::Error),

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub(crate) fn at(key: impl Into<String>, message: impl ToString) -> Self {
        CliError::Document {
            key: key.into(),
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
