use std::path::PathBuf;

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {message}")]
    Syntax { path: PathBuf, line: usize, message: String },
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("unknown key `{key}` for `{command}`")]
    UnknownKey { key: String, command: String },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("key `{key}`: cannot read `{value}` as {expected}")]
    Type { key: String, value: String, expected: String },
    #[error("key `{key}`: {message}")]
    Range { key: String, message: String },
    #[error("{context}: {source}")]
    Library {
        context: String,
        key: Option<String>,
        #[source]
        source: mesozeta::Error,
    },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage-error",
            CliError::Syntax { .. } => "syntax-error",
            CliError::UnknownCommand(_) => "unknown-command",
            CliError::UnknownKey { .. } => "unknown-key",
            CliError::MissingKey(_) => "missing-key",
            CliError::Type { .. } => "type-error",
            CliError::Range { .. } => "range-error",
            CliError::Library { source, .. } => match source {
                mesozeta::Error::ChecksumMismatch { .. } => "checksum-mismatch",
                mesozeta::Error::Network { .. } => "network-error",
                mesozeta::Error::UnknownSource(_) => "unknown-source",
                mesozeta::Error::OutOfCoverage { .. } => "out-of-coverage",
                mesozeta::Error::CacheFormat { .. } => "cache-format",
                mesozeta::Error::ParameterRange { .. } => "range-error",
                _ => "computation-error",
            },
            CliError::Io { .. } => "io-error",
        }
    }

    pub fn key(&self) -> Option<&str> {
        match self {
            CliError::UnknownKey { key, .. } | CliError::Type { key, .. } | CliError::Range { key, .. } => Some(key),
            CliError::MissingKey(key) => Some(key),
            CliError::Library { key, .. } => key.as_deref(),
            _ => None,
        }
    }

    /// Configuration problems exit with 2, failures during a run with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library { key: None, .. } | CliError::Io { .. } => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "kind": self.kind(), "key": self.key(), "message": self.to_string() } })
    }
}

/// A range violation found while validating `key` becomes a range error on
/// it; other library errors keep their kind.
pub fn invalid(key: &str, err: mesozeta::Error) -> CliError {
    match err {
        mesozeta::Error::ParameterRange { value, requirement, .. } => {
            CliError::Range { key: key.to_string(), message: format!("{value} is out of range: {requirement}") }
        }
        mesozeta::Error::InvalidLiteral { .. } | mesozeta::Error::UnknownSource(_) => {
            CliError::Range { key: key.to_string(), message: err.to_string() }
        }
        source => CliError::Library { context: format!("key `{key}`"), key: Some(key.to_string()), source },
    }
}

/// Like `invalid`, naming the parameter the library reports.
pub fn rejected(err: mesozeta::Error) -> CliError {
    match &err {
        mesozeta::Error::ParameterRange { name, .. } => {
            let key = name.to_string();
            invalid(&key, err)
        }
        _ => invalid("", err),
    }
}

pub trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, mesozeta::Error> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Library { context: what.to_string(), key: None, source })
    }
}

impl<T> Context<T> for Result<T, std::io::Error> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Io { context: what.to_string(), source })
    }
}
