use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fieldpath::FieldPathError;
use crate::metrics::MetricError;
use crate::pit::PitError;
use crate::render::RenderError;
use crate::tornado::TornadoError;
use crate::whatif::WhatIfError;

/// One validation finding, addressed by project and field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// `None` for portfolio- or config-level findings.
    pub project_id: Option<String>,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    pub fn project(id: &str, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            project_id: Some(id.to_string()),
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn portfolio(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            project_id: None,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn config(field: &str, message: impl Into<String>) -> Self {
        Self {
            project_id: None,
            field: format!("config.{field}"),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.project_id {
            Some(id) => write!(f, "project {id}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

/// Non-empty list of validation findings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValidationErrors(Vec<Diagnostic>);

impl ValidationErrors {
    pub(crate) fn from_vec(diags: Vec<Diagnostic>) -> Result<(), Self> {
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Self(diags))
        }
    }

    pub fn single(diag: Diagnostic) -> Self {
        Self(vec![diag])
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for d in &self.0 {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

/// Crate-level error, grouped the way callers report them.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationErrors),
    #[error(transparent)]
    FieldPath(#[from] FieldPathError),
    #[error(transparent)]
    WhatIf(#[from] WhatIfError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Pit(#[from] PitError),
    #[error(transparent)]
    Tornado(#[from] TornadoError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("parse error in {source_name}: {message}")]
    Parse { source_name: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Broad failure class, used for exit codes and HTTP status mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    NotFound,
    Domain,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Validation(_) | Error::FieldPath(_) | Error::Parse { .. } => ErrorClass::Validation,
            Error::WhatIf(e) => e.class(),
            Error::Tornado(e) => e.class(),
            Error::Pit(PitError::UnknownProject(_)) => ErrorClass::NotFound,
            Error::Metric(_) | Error::Pit(_) | Error::Render(_) => ErrorClass::Domain,
            Error::Io { .. } => ErrorClass::Io,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
