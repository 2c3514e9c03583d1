use std::path::PathBuf;

use cpoint_core::frontier::FrontierError;
use cpoint_core::mdl::MdlError;
use cpoint_core::moments::MomentsError;
use cpoint_core::qp::QpError;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}:{line}: {message}")]
    Format { file: String, line: usize, message: String },
    #[error("{file}: {source}")]
    Mdl { file: String, source: MdlError },
    #[error(transparent)]
    Moments(#[from] MomentsError),
    #[error(transparent)]
    Qp(#[from] QpError),
    #[error(transparent)]
    Frontier(#[from] FrontierError),
    #[error("invalid bundle: {0}")]
    Bundle(String),
    #[error("unknown model {0}")]
    UnknownModel(String),
    #[error("invalid request: {0}")]
    Request(String),
    #[error("selection is out of range ({0})")]
    OutOfRange(&'static str),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn mdl(file: &str, source: MdlError) -> Self {
        Error::Mdl { file: file.to_string(), source }
    }

    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
            Error::Mdl { source, .. } => match source {
                MdlError::Lex { .. } => "lex",
                MdlError::Parse { .. } => "parse",
                MdlError::UnknownName { .. } => "unknown_name",
                MdlError::UniverseViolation { .. } => "universe_violation",
                MdlError::DivisionByZero { .. } => "division_by_zero",
                MdlError::InvalidOperation { .. } => "invalid_operation",
                MdlError::DuplicateName { .. } => "duplicate_name",
                MdlError::TypeMismatch { .. } => "type_mismatch",
                MdlError::MissingUniverse => "missing_universe",
                MdlError::MissingNormalConstraint => "missing_normal_constraint",
                MdlError::MissingOptionField { .. } => "missing_option_field",
                MdlError::Moments(_) => "moments",
                MdlError::Qp(_) => "model",
            },
            Error::Moments(MomentsError::MissingQuote { .. }) => "missing_quote",
            Error::Moments(MomentsError::InsufficientSamples) => "insufficient_samples",
            Error::Moments(_) => "moments",
            Error::Qp(QpError::InfeasibleModel) => "infeasible",
            Error::Qp(_) => "model",
            Error::Frontier(_) => "frontier",
            Error::Bundle(_) => "bundle",
            Error::UnknownModel(_) => "not_found",
            Error::Request(_) => "invalid_request",
            Error::OutOfRange(_) => "out_of_range",
        }
    }

    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Format { line, .. } => Some(*line),
            Error::Mdl { source, .. } => source.line(),
            _ => None,
        }
    }

    pub fn col(&self) -> Option<usize> {
        match self {
            Error::Mdl { source, .. } => source.col(),
            _ => None,
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody { code: self.code(), message: self.to_string(), line: self.line(), col: self.col() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub col: Option<usize>,
}
