//! Project Impact Tornado data: per-project exclusion and guaranteed-success
//! impacts on a portfolio metric.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{analytic_expectation, simulate_portfolio, AnalyticExpectation, CashFlowSet};
use crate::error::ValidationErrors;
use crate::metrics::{
    conditional_project_totals, project_totals, Metric, MetricError, Scope, Totals,
};
use crate::model::{EngineKind, SimConfig, ValidatedPortfolio};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PitError {
    #[error("exclusion undefined: a PIT-plot needs at least two projects, got {0}")]
    ExclusionUndefined(usize),
    #[error("unknown project id '{0}'")]
    UnknownProject(String),
    #[error("success bar not estimable for project {0}: no successful iterations")]
    SuccessNotEstimable(String),
    #[error("portfolio metric: {0}")]
    CenterMetric(#[source] MetricError),
}

/// Risk-adjusted and success-conditional totals for one project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectEvaluation {
    pub project_id: String,
    pub totals: Totals,
    /// Means over launched outcomes; `None` if no launch was observed.
    pub conditional: Option<Totals>,
    /// Exact launch probability (analytic) or observed launch fraction (MC).
    pub success_prob: f64,
}

impl ProjectEvaluation {
    pub fn from_cash_flows(cf: &CashFlowSet) -> Self {
        Self {
            project_id: cf.project_id().to_string(),
            totals: project_totals(cf),
            conditional: conditional_project_totals(cf),
            success_prob: cf.success_fraction(),
        }
    }

    pub fn from_analytic(e: &AnalyticExpectation) -> Self {
        let conditional = (e.success_prob > 0.0).then(|| {
            Totals::new(
                e.conditional_revenue,
                e.conditional_cost,
                Scope::PortfolioGivenSuccess(e.project_id.clone()),
            )
        });
        Self {
            project_id: e.project_id.clone(),
            totals: Totals::from(e),
            conditional,
            success_prob: e.success_prob,
        }
    }
}

/// Runs the configured engine over every project.
pub fn evaluate_portfolio(
    portfolio: &ValidatedPortfolio,
    config: &SimConfig,
) -> Result<Vec<ProjectEvaluation>, ValidationErrors> {
    config.validate()?;
    Ok(match config.engine {
        EngineKind::MonteCarlo => simulate_portfolio(portfolio, config)
            .iter()
            .map(ProjectEvaluation::from_cash_flows)
            .collect(),
        EngineKind::Analytic => portfolio
            .projects()
            .iter()
            .map(|p| ProjectEvaluation::from_analytic(&analytic_expectation(p, config)))
            .collect(),
    })
}

fn project_id(t: &Totals) -> Option<&str> {
    match &t.scope {
        Scope::Project(id) => Some(id),
        _ => None,
    }
}

/// Sums in input order, replacing (or dropping) the entry for `id`.
fn sum_with(all: &[Totals], id: &str, replacement: Option<&Totals>) -> (f64, f64) {
    all.iter().fold((0.0, 0.0), |(r, c), t| {
        if project_id(t) == Some(id) {
            match replacement {
                Some(x) => (r + x.revenue, c + x.cost),
                None => (r, c),
            }
        } else {
            (r + t.revenue, c + t.cost)
        }
    })
}

fn ensure_member(all: &[Totals], id: &str) -> Result<(), PitError> {
    if all.iter().any(|t| project_id(t) == Some(id)) {
        Ok(())
    } else {
        Err(PitError::UnknownProject(id.to_string()))
    }
}

/// Portfolio totals with project `id` left out.
pub fn exclusion_totals(all: &[Totals], id: &str) -> Result<Totals, PitError> {
    if all.len() < 2 {
        return Err(PitError::ExclusionUndefined(all.len()));
    }
    ensure_member(all, id)?;
    let (revenue, cost) = sum_with(all, id, None);
    Ok(Totals::new(revenue, cost, Scope::PortfolioExcluding(id.to_string())))
}

/// Other projects' risk-adjusted totals plus project `id`'s totals given
/// that it launches.
pub fn success_conditional_totals(
    all: &[Totals],
    id: &str,
    conditional: Option<&Totals>,
) -> Result<Totals, PitError> {
    ensure_member(all, id)?;
    let conditional = conditional.ok_or_else(|| PitError::SuccessNotEstimable(id.to_string()))?;
    let (revenue, cost) = sum_with(all, id, Some(conditional));
    Ok(Totals::new(revenue, cost, Scope::PortfolioGivenSuccess(id.to_string())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    ExclusionUndefined,
    SuccessUnavailable,
    SuccessUndefined,
    ProjectMetricUndefined,
}

impl RowFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RowFlag::ExclusionUndefined => "exclusion_undefined",
            RowFlag::SuccessUnavailable => "success_unavailable",
            RowFlag::SuccessUndefined => "success_undefined",
            RowFlag::ProjectMetricUndefined => "project_metric_undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitRow {
    pub project_id: String,
    /// Metric change when the project is removed.
    pub delta_exclusion: Option<f64>,
    /// Metric change when the project's launch is certain.
    pub delta_success: Option<f64>,
    /// The metric on the project alone, for reporting.
    pub project_metric: Option<f64>,
    pub success_available: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<RowFlag>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PitData {
    pub metric_name: String,
    /// Metric of the whole portfolio; the plot's center line.
    pub center_value: f64,
    /// Ascending by `delta_exclusion`, ties by project id.
    pub rows: Vec<PitRow>,
}

impl PitData {
    pub fn row(&self, id: &str) -> Option<&PitRow> {
        self.rows.iter().find(|r| r.project_id == id)
    }

    /// Project ids in plot order, top to bottom.
    pub fn order(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.project_id.as_str()).collect()
    }
}

fn row_order(a: &PitRow, b: &PitRow) -> Ordering {
    let key = |r: &PitRow| r.delta_exclusion.unwrap_or(f64::INFINITY);
    key(a)
        .total_cmp(&key(b))
        .then_with(|| a.delta_exclusion.is_none().cmp(&b.delta_exclusion.is_none()))
        .then_with(|| a.project_id.cmp(&b.project_id))
}

/// Builds the PIT data for `metric` from per-project evaluations.
pub fn compute_pit(evals: &[ProjectEvaluation], metric: &dyn Metric) -> Result<PitData, PitError> {
    if evals.len() < 2 {
        return Err(PitError::ExclusionUndefined(evals.len()));
    }
    let all: Vec<Totals> = evals.iter().map(|e| e.totals.clone()).collect();
    let center = metric
        .evaluate(&crate::metrics::portfolio_totals(&all))
        .map_err(PitError::CenterMetric)?;

    let mut rows: Vec<PitRow> = evals
        .par_iter()
        .map(|e| {
            let id = e.project_id.as_str();
            let mut flags = Vec::new();
            let mut diagnostics = Vec::new();

            let delta_exclusion = match exclusion_totals(&all, id).map(|t| metric.evaluate(&t)) {
                Ok(Ok(v)) => Some(v - center),
                Ok(Err(err)) => {
                    flags.push(RowFlag::ExclusionUndefined);
                    diagnostics.push(format!("exclusion: {err}"));
                    None
                }
                Err(err) => {
                    flags.push(RowFlag::ExclusionUndefined);
                    diagnostics.push(err.to_string());
                    None
                }
            };

            let delta_success = match success_conditional_totals(&all, id, e.conditional.as_ref()) {
                Ok(t) => match metric.evaluate(&t) {
                    Ok(v) => Some(v - center),
                    Err(err) => {
                        flags.push(RowFlag::SuccessUndefined);
                        diagnostics.push(format!("success: {err}"));
                        None
                    }
                },
                Err(err) => {
                    flags.push(RowFlag::SuccessUnavailable);
                    diagnostics.push(err.to_string());
                    None
                }
            };

            let project_metric = match metric.evaluate(&e.totals) {
                Ok(v) => Some(v),
                Err(err) => {
                    flags.push(RowFlag::ProjectMetricUndefined);
                    diagnostics.push(format!("project: {err}"));
                    None
                }
            };

            PitRow {
                project_id: id.to_string(),
                delta_exclusion,
                delta_success,
                project_metric,
                success_available: e.conditional.is_some(),
                flags,
                diagnostics,
            }
        })
        .collect();
    rows.sort_by(row_order);

    Ok(PitData {
        metric_name: metric.name().to_string(),
        center_value: center,
        rows,
    })
}

/// Evaluates the portfolio with the configured engine and builds its PIT data.
pub fn run_pit(
    portfolio: &ValidatedPortfolio,
    config: &SimConfig,
    metric: &dyn Metric,
) -> crate::Result<PitData> {
    let evals = evaluate_portfolio(portfolio, config)?;
    Ok(compute_pit(&evals, metric)?)
}

/// Metric of the whole portfolio under the configured engine.
pub fn portfolio_metric(
    portfolio: &ValidatedPortfolio,
    config: &SimConfig,
    metric: &dyn Metric,
) -> crate::Result<f64> {
    let evals = evaluate_portfolio(portfolio, config)?;
    let totals = crate::metrics::portfolio_totals(evals.iter().map(|e| &e.totals));
    Ok(metric.evaluate(&totals)?)
}
