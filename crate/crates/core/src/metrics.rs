//! Risk-adjusted totals and the portfolio metrics evaluated on them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{AnalyticExpectation, CashFlowSet};

/// Present-value factor 1/(1+q)^t for year index `t`.
pub fn discount_factor(rate: f64, year: usize) -> f64 {
    let t = i32::try_from(year).unwrap_or(i32::MAX);
    1.0 / (1.0 + rate).powi(t)
}

/// What a pair of totals was summed over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "project_id", rename_all = "snake_case")]
pub enum Scope {
    Project(String),
    Portfolio,
    PortfolioExcluding(String),
    PortfolioGivenSuccess(String),
}

/// Expected discounted revenue and development cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub revenue: f64,
    pub cost: f64,
    pub scope: Scope,
}

impl Totals {
    pub fn new(revenue: f64, cost: f64, scope: Scope) -> Self {
        Self {
            revenue,
            cost,
            scope,
        }
    }

    pub fn project(id: &str, revenue: f64, cost: f64) -> Self {
        Self::new(revenue, cost, Scope::Project(id.to_string()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.revenue * factor, self.cost * factor, self.scope.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("{metric} undefined: {reason}")]
    Undefined { metric: String, reason: String },
}

impl MetricError {
    pub fn undefined(metric: &str, reason: impl Into<String>) -> Self {
        MetricError::Undefined {
            metric: metric.to_string(),
            reason: reason.into(),
        }
    }
}

/// A scalar portfolio metric computed from aggregated totals.
pub trait Metric: Send + Sync {
    fn name(&self) -> &str;

    fn evaluate(&self, totals: &Totals) -> Result<f64, MetricError>;

    /// True when the metric of a sum equals the sum of the metrics.
    fn is_additive(&self) -> bool {
        false
    }
}

/// Built-in metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    /// Productivity Index, (R - C) / C.
    #[default]
    Pi,
    /// Expected net present value, R - C.
    Enpv,
}

impl MetricKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MetricKind::Pi => "pi",
            MetricKind::Enpv => "enpv",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pi" | "productivity_index" => Ok(MetricKind::Pi),
            "enpv" => Ok(MetricKind::Enpv),
            _ => Err(format!("unknown metric '{s}' (expected pi or enpv)")),
        }
    }
}

impl Metric for MetricKind {
    fn name(&self) -> &str {
        self.as_str()
    }

    fn evaluate(&self, totals: &Totals) -> Result<f64, MetricError> {
        match self {
            MetricKind::Pi => productivity_index(totals),
            MetricKind::Enpv => Ok(enpv(totals)),
        }
    }

    fn is_additive(&self) -> bool {
        matches!(self, MetricKind::Enpv)
    }
}

type EvalFn = dyn Fn(&Totals) -> Result<f64, MetricError> + Send + Sync;

/// A user-supplied metric.
#[derive(Clone)]
pub struct MetricDef {
    name: String,
    evaluate: Arc<EvalFn>,
    additive: bool,
}

impl MetricDef {
    pub fn new<F>(name: impl Into<String>, additive: bool, evaluate: F) -> Self
    where
        F: Fn(&Totals) -> Result<f64, MetricError> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            evaluate: Arc::new(evaluate),
            additive,
        }
    }
}

impl fmt::Debug for MetricDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricDef")
            .field("name", &self.name)
            .field("additive", &self.additive)
            .finish_non_exhaustive()
    }
}

impl Metric for MetricDef {
    fn name(&self) -> &str {
        &self.name
    }

    fn evaluate(&self, totals: &Totals) -> Result<f64, MetricError> {
        (self.evaluate)(totals)
    }

    fn is_additive(&self) -> bool {
        self.additive
    }
}

pub fn productivity_index(t: &Totals) -> Result<f64, MetricError> {
    if t.cost > 0.0 && t.cost.is_finite() {
        Ok((t.revenue - t.cost) / t.cost)
    } else {
        Err(MetricError::undefined("pi", "PI undefined for zero cost"))
    }
}

pub fn enpv(t: &Totals) -> f64 {
    t.revenue - t.cost
}

/// Grand mean over iterations of year-summed discounted flows.
pub fn project_totals(cf: &CashFlowSet) -> Totals {
    Totals::project(cf.project_id(), cf.mean_revenue(), cf.mean_cost())
}

/// Means over the launched iterations only; `None` when there are none.
pub fn conditional_project_totals(cf: &CashFlowSet) -> Option<Totals> {
    Some(Totals::new(
        cf.success_mean_revenue()?,
        cf.success_mean_cost()?,
        Scope::PortfolioGivenSuccess(cf.project_id().to_string()),
    ))
}

impl From<&AnalyticExpectation> for Totals {
    fn from(e: &AnalyticExpectation) -> Self {
        Totals::project(&e.project_id, e.expected_revenue, e.expected_cost)
    }
}

pub fn portfolio_totals<'a, I>(all: I) -> Totals
where
    I: IntoIterator<Item = &'a Totals>,
{
    let (revenue, cost) = all
        .into_iter()
        .fold((0.0, 0.0), |(r, c), t| (r + t.revenue, c + t.cost));
    Totals::new(revenue, cost, Scope::Portfolio)
}
