//! Application errors and their exit codes.

use serde::Serialize;
use thiserror::Error;

use crate::oracle::OracleError;

/// Failure classes of the CLI.
#[derive(Debug, Error)]
pub enum AppError {
    /// Bad configuration or unsupported combination.
    #[error("{message}")]
    Validation {
        /// Field path, when known.
        path: Option<String>,
        /// Description.
        message: String,
    },
    /// Singular or otherwise failed evaluation.
    #[error("{0}")]
    Numeric(String),
    /// Filesystem failure.
    #[error("{0}")]
    Io(String),
}

/// Machine-readable error report.
#[derive(Debug, Serialize)]
pub struct Diagnostic<'a> {
    /// `validation`, `numeric` or `io`.
    pub kind: &'static str,
    /// Field path, when known.
    pub path: Option<&'a str>,
    /// Description.
    pub message: String,
    /// Process exit code.
    pub exit_code: i32,
}

impl AppError {
    /// Validation error without a path.
    pub fn validation(message: impl Into<String>) -> Self {
        AppError::Validation { path: None, message: message.into() }
    }

    /// Validation error at `path`.
    pub fn validation_at(path: impl Into<String>, message: impl Into<String>) -> Self {
        AppError::Validation { path: Some(path.into()), message: message.into() }
    }

    /// Exit code: 2 validation, 3 numeric, 4 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation { .. } => 2,
            AppError::Numeric(_) => 3,
            AppError::Io(_) => 4,
        }
    }

    /// Report for stderr.
    pub fn diagnostic(&self) -> Diagnostic<'_> {
        let (kind, path) = match self {
            AppError::Validation { path, .. } => ("validation", path.as_deref()),
            AppError::Numeric(_) => ("numeric", None),
            AppError::Io(_) => ("io", None),
        };
        Diagnostic { kind, path, message: self.to_string(), exit_code: self.exit_code() }
    }

    /// Prefixes validation errors with a field path.
    pub fn at(self, prefix: &str) -> Self {
        match self {
            AppError::Validation { path, message } => AppError::Validation {
                path: Some(match path {
                    Some(p) => format!("{prefix}.{p}"),
                    None => prefix.to_string(),
                }),
                message,
            },
            e => e,
        }
    }
}

impl From<optomech_core::Error> for AppError {
    fn from(e: optomech_core::Error) -> Self {
        use optomech_core::Error as E;
        match e {
            E::Pole { .. }
            | E::NoCancellation { .. }
            | E::SingularReferral { .. }
            | E::SingularDc(_)
            | E::Degenerate(_) => AppError::Numeric(e.to_string()),
            E::Parameter { name, .. } => AppError::validation_at(name, e.to_string()),
            _ => AppError::validation(e.to_string()),
        }
    }
}

impl From<OracleError> for AppError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Engine(inner) => inner.into(),
            other => AppError::validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}
