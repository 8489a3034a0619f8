//! The crate-wide error type and its machine-readable form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::CostError;
use crate::energy::DomainError;
use crate::hardware::HardwareError;
use crate::spec_io::{SourceLocation, SpecError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Hardware(#[from] HardwareError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    /// A request body or request file that is not well-formed.
    #[error("malformed request: {0}")]
    Request(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable identifier used in error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Spec(SpecError::Syntax { .. }) | Error::Request(_) => "parse_error",
            Error::Spec(SpecError::Schema { .. }) => "schema_error",
            Error::Spec(SpecError::Validation { .. }) => "validation_error",
            Error::Spec(SpecError::NotFound { .. }) => "unknown_model",
            Error::Cost(_) => "shape_error",
            Error::Hardware(HardwareError::UnknownProfile(_)) => "unknown_hardware",
            Error::Hardware(HardwareError::Invalid { .. }) => "validation_error",
            Error::Hardware(_) => "capability_error",
            Error::Domain(_) => "domain_error",
            Error::Io { .. } => "io_error",
        }
    }

    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Spec(_) | Error::Request(_) => 2,
            Error::Hardware(HardwareError::Invalid { .. }) => 2,
            Error::Cost(_) => 3,
            Error::Hardware(_) => 4,
            Error::Domain(_) => 5,
            Error::Io { .. } => 1,
        }
    }

    pub fn http_status(&self) -> u16 {
        match self {
            Error::Spec(SpecError::NotFound { .. }) | Error::Hardware(HardwareError::UnknownProfile(_)) => 404,
            Error::Io { .. } => 500,
            _ => 400,
        }
    }

    pub fn location(&self) -> Option<SourceLocation> {
        match self {
            Error::Spec(e) => e.location().cloned(),
            Error::Cost(e) => Some(SourceLocation::path(format!("network.layers[{}]", e.layer()))),
            _ => None,
        }
    }

    pub fn to_object(&self) -> ErrorObject {
        ErrorObject {
            code: self.code().to_string(),
            message: self.to_string(),
            location: self.location(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorObject {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<SourceLocation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorObject,
}

impl From<&Error> for ErrorBody {
    fn from(e: &Error) -> Self {
        Self { error: e.to_object() }
    }
}
