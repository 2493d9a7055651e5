//! Derived portfolios: terminate projects, guarantee launches, or edit fields.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{ErrorClass, ValidationErrors};
use crate::fieldpath::{FieldPath, FieldPathError};
use crate::export::WhatIfReport;
use crate::metrics::Metric;
use crate::model::{validate_portfolio, SimConfig, ValidatedPortfolio};
use crate::pit::run_pit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldOverride {
    pub project_id: String,
    pub field: FieldPath,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WhatIf {
    /// Projects removed from the portfolio.
    pub exclusions: BTreeSet<String>,
    /// Projects whose every gate probability becomes 1.
    pub forced_success: BTreeSet<String>,
    pub overrides: Vec<FieldOverride>,
}

impl WhatIf {
    pub fn is_empty(&self) -> bool {
        self.exclusions.is_empty() && self.forced_success.is_empty() && self.overrides.is_empty()
    }

    pub fn exclude<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            exclusions: ids.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WhatIfError {
    #[error("unknown project id '{0}'")]
    UnknownProject(String),
    #[error(transparent)]
    Field(#[from] FieldPathError),
    #[error("what-if result is invalid: {0}")]
    Invalid(ValidationErrors),
}

impl WhatIfError {
    pub fn class(&self) -> ErrorClass {
        match self {
            WhatIfError::UnknownProject(_) | WhatIfError::Field(FieldPathError::UnknownProject(_)) => {
                ErrorClass::NotFound
            }
            _ => ErrorClass::Validation,
        }
    }
}

/// Returns a new validated portfolio with the scenario applied.
///
/// Overrides are applied first, then forced successes, then exclusions.
/// The input is left untouched.
pub fn apply_whatif(portfolio: &ValidatedPortfolio, w: &WhatIf) -> Result<ValidatedPortfolio, WhatIfError> {
    let ids = w
        .exclusions
        .iter()
        .chain(&w.forced_success)
        .chain(w.overrides.iter().map(|o| &o.project_id));
    for id in ids {
        if portfolio.project(id).is_none() {
            return Err(WhatIfError::UnknownProject(id.clone()));
        }
    }

    let mut spec = portfolio.spec().clone();
    for o in &w.overrides {
        o.field.set(&mut spec, &o.project_id, o.value)?;
    }
    for id in &w.forced_success {
        if let Some(p) = spec.project_mut(id) {
            for phase in &mut p.phases {
                phase.pos = 1.0;
            }
        }
    }
    spec.projects.retain(|p| !w.exclusions.contains(&p.id));

    validate_portfolio(spec).map_err(WhatIfError::Invalid)
}

/// Baseline and scenario PIT data for `w` under one config and metric.
pub fn run_whatif(
    portfolio: &ValidatedPortfolio,
    config: &SimConfig,
    w: &WhatIf,
    metric: &dyn Metric,
) -> crate::Result<WhatIfReport> {
    let scenario = apply_whatif(portfolio, w)?;
    let baseline = run_pit(portfolio, config, metric)?;
    Ok(WhatIfReport::new(baseline, run_pit(&scenario, config, metric)?))
}
