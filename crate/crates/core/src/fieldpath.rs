//! Addresses for the numeric fields of a project, e.g. `peak_sales` or `Ph3.pos`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::model::{PhaseId, PortfolioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseField {
    Duration,
    Cost,
    Pos,
}

impl PhaseField {
    fn as_str(self) -> &'static str {
        match self {
            PhaseField::Duration => "duration",
            PhaseField::Cost => "cost",
            PhaseField::Pos => "pos",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldPath {
    PeakSales,
    Phase(PhaseId, PhaseField),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldPathError {
    #[error("unknown field path '{0}' (expected peak_sales or <phase>.<duration|cost|pos>)")]
    Unknown(String),
    #[error("unknown project id '{0}'")]
    UnknownProject(String),
    #[error("project {project_id} has no {phase} phase")]
    MissingPhase { project_id: String, phase: PhaseId },
}

impl FieldPath {
    /// Current value of this field on `project_id`.
    pub fn get(&self, portfolio: &PortfolioSpec, project_id: &str) -> Result<f64, FieldPathError> {
        let project = portfolio
            .project(project_id)
            .ok_or_else(|| FieldPathError::UnknownProject(project_id.to_string()))?;
        match *self {
            FieldPath::PeakSales => Ok(project.peak_sales),
            FieldPath::Phase(phase, field) => {
                let p = project.phase(phase).ok_or_else(|| FieldPathError::MissingPhase {
                    project_id: project_id.to_string(),
                    phase,
                })?;
                Ok(match field {
                    PhaseField::Duration => p.duration,
                    PhaseField::Cost => p.cost,
                    PhaseField::Pos => p.pos,
                })
            }
        }
    }

    /// Writes `value` without validating it; callers re-validate the portfolio.
    pub fn set(
        &self,
        portfolio: &mut PortfolioSpec,
        project_id: &str,
        value: f64,
    ) -> Result<(), FieldPathError> {
        let project = portfolio
            .project_mut(project_id)
            .ok_or_else(|| FieldPathError::UnknownProject(project_id.to_string()))?;
        match *self {
            FieldPath::PeakSales => project.peak_sales = value,
            FieldPath::Phase(phase, field) => {
                let p = project.phase_mut(phase).ok_or_else(|| FieldPathError::MissingPhase {
                    project_id: project_id.to_string(),
                    phase,
                })?;
                match field {
                    PhaseField::Duration => p.duration = value,
                    PhaseField::Cost => p.cost = value,
                    PhaseField::Pos => p.pos = value,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for FieldPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldPath::PeakSales => f.write_str("peak_sales"),
            FieldPath::Phase(phase, field) => write!(f, "{}.{}", phase, field.as_str()),
        }
    }
}

impl FromStr for FieldPath {
    type Err = FieldPathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || FieldPathError::Unknown(s.to_string());
        let trimmed = s.trim();
        let trimmed = trimmed.strip_prefix("phases.").unwrap_or(trimmed);
        if trimmed.eq_ignore_ascii_case("peak_sales") {
            return Ok(FieldPath::PeakSales);
        }
        let (phase, field) = trimmed.split_once('.').ok_or_else(unknown)?;
        let phase: PhaseId = phase.parse().map_err(|_| unknown())?;
        let field = match field.to_ascii_lowercase().as_str() {
            "duration" | "duration_years" => PhaseField::Duration,
            "cost" | "cost_total" => PhaseField::Cost,
            "pos" | "success_prob" => PhaseField::Pos,
            _ => return Err(unknown()),
        };
        Ok(FieldPath::Phase(phase, field))
    }
}

impl Serialize for FieldPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FieldPath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
