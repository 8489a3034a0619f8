//! Reading and writing `.nnspec` network files and `.hwspec` profile files.
//!
//! Both formats are TOML documents with a top-level `format_version` key.
//! Parsing is strict about types and, by default, about unknown keys; every
//! diagnostic carries a line/column and a dotted key path.

mod reader;

pub mod network;
pub mod profiles;
pub mod zoo;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use network::{parse_spec, parse_spec_with, serialize_spec, Metadata, SpecDocument};
pub use profiles::{parse_profiles, parse_profiles_with, serialize_profiles, ProfileDocument};
pub use zoo::{model_zoo, zoo_entry, ModelZooEntry};

/// The only format version this build reads and writes.
pub const FORMAT_VERSION: &str = "1";

/// Position of a diagnostic: 1-based line/column when the input had source
/// text, and always a dotted key path such as `network.layers[2].stride_rows`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceLocation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    pub path: String,
}

impl SourceLocation {
    pub fn path(path: impl Into<String>) -> Self {
        Self {
            line: None,
            column: None,
            path: path.into(),
        }
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let (Some(line), Some(col)) = (self.line, self.column) {
            write!(f, "line {line}, column {col}")?;
            if !self.path.is_empty() {
                write!(f, " (`{}`)", self.path)?;
            }
            Ok(())
        } else if self.path.is_empty() {
            f.write_str("document root")
        } else {
            write!(f, "`{}`", self.path)
        }
    }
}

/// A non-fatal finding, e.g. an ignored unknown key in lenient mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub location: SourceLocation,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// How unknown keys are treated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("syntax error at {location}: {message}")]
    Syntax {
        location: SourceLocation,
        message: String,
    },
    #[error("schema error at {location}: {message}")]
    Schema {
        location: SourceLocation,
        message: String,
    },
    #[error("invalid value at {location}: {message}")]
    Validation {
        location: SourceLocation,
        layer: Option<usize>,
        field: String,
        message: String,
    },
    #[error("no model zoo entry named `{id}`")]
    NotFound { id: String },
}

impl SpecError {
    pub fn location(&self) -> Option<&SourceLocation> {
        match self {
            SpecError::Syntax { location, .. }
            | SpecError::Schema { location, .. }
            | SpecError::Validation { location, .. } => Some(location),
            SpecError::NotFound { .. } => None,
        }
    }
}
