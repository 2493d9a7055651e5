//! One-at-a-time low/base/high sensitivity analysis.

use std::collections::BTreeMap;
use std::fmt::Display;

use evalexpr::{ContextWithMutableVariables, HashMapContext, Node, Value};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{ErrorClass, ValidationErrors};
use crate::fieldpath::{FieldPath, FieldPathError};
use crate::metrics::{Metric, MetricKind};
use crate::model::{validate_portfolio, SimConfig, ValidatedPortfolio};
use crate::pit::portfolio_metric;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioVariable {
    pub name: String,
    pub low: f64,
    pub base: f64,
    pub high: f64,
}

impl ScenarioVariable {
    pub fn new(name: impl Into<String>, low: f64, base: f64, high: f64) -> Self {
        Self {
            name: name.into(),
            low,
            base,
            high,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TornadoRow {
    pub variable_name: String,
    pub outcome_low: f64,
    pub outcome_base: f64,
    pub outcome_high: f64,
    /// max(outcomes) - min(outcomes).
    pub span: f64,
}

impl TornadoRow {
    pub fn min_outcome(&self) -> f64 {
        self.outcome_low.min(self.outcome_base).min(self.outcome_high)
    }

    pub fn max_outcome(&self) -> f64 {
        self.outcome_low.max(self.outcome_base).max(self.outcome_high)
    }
}

/// Which point of a variable's range was being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Low,
    Base,
    High,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scenario::Low => "low",
            Scenario::Base => "base",
            Scenario::High => "high",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TornadoError {
    #[error("tornado analysis needs at least one variable")]
    NoVariables,
    #[error("variable '{0}' listed more than once")]
    DuplicateVariable(String),
    #[error("variable '{name}': expected low <= base <= high, got {low} / {base} / {high}")]
    InvalidRange {
        name: String,
        low: f64,
        base: f64,
        high: f64,
    },
    #[error("model evaluation failed for variable '{variable}' at {scenario}: {message}")]
    Model {
        variable: String,
        scenario: Scenario,
        message: String,
    },
    #[error("bad expression: {0}")]
    Expression(String),
    #[error(transparent)]
    Field(#[from] FieldPathError),
    #[error("perturbation {variable} = {value} is invalid: {errors}")]
    InvalidPerturbation {
        variable: String,
        value: f64,
        errors: ValidationErrors,
    },
}

impl TornadoError {
    pub fn class(&self) -> ErrorClass {
        match self {
            TornadoError::Field(FieldPathError::UnknownProject(_)) => ErrorClass::NotFound,
            TornadoError::Model { .. } => ErrorClass::Domain,
            _ => ErrorClass::Validation,
        }
    }
}

/// Name for the all-base evaluation in error reports.
const BASE_LABEL: &str = "(base case)";

/// Evaluates `model` with every variable at base, then each variable at its
/// low and high value with all others held at base.
///
/// Rows come back sorted by span, widest first, ties by name.
pub fn tornado_analysis<F, E>(model: F, variables: &[ScenarioVariable]) -> Result<Vec<TornadoRow>, TornadoError>
where
    F: Fn(&BTreeMap<String, f64>) -> Result<f64, E> + Sync,
    E: Display,
{
    if variables.is_empty() {
        return Err(TornadoError::NoVariables);
    }
    let mut base_point = BTreeMap::new();
    for v in variables {
        if !(v.low <= v.base && v.base <= v.high) {
            return Err(TornadoError::InvalidRange {
                name: v.name.clone(),
                low: v.low,
                base: v.base,
                high: v.high,
            });
        }
        if base_point.insert(v.name.clone(), v.base).is_some() {
            return Err(TornadoError::DuplicateVariable(v.name.clone()));
        }
    }

    let run = |variable: &str, scenario: Scenario, point: &BTreeMap<String, f64>| {
        model(point).map_err(|e| TornadoError::Model {
            variable: variable.to_string(),
            scenario,
            message: e.to_string(),
        })
    };

    let base = run(BASE_LABEL, Scenario::Base, &base_point)?;

    let mut rows = variables
        .par_iter()
        .map(|v| {
            let mut point = base_point.clone();
            point.insert(v.name.clone(), v.low);
            let low = run(&v.name, Scenario::Low, &point)?;
            point.insert(v.name.clone(), v.high);
            let high = run(&v.name, Scenario::High, &point)?;
            let max = low.max(base).max(high);
            let min = low.min(base).min(high);
            Ok(TornadoRow {
                variable_name: v.name.clone(),
                outcome_low: low,
                outcome_base: base,
                outcome_high: high,
                span: max - min,
            })
        })
        .collect::<Result<Vec<_>, TornadoError>>()?;

    rows.sort_by(|a, b| {
        b.span
            .total_cmp(&a.span)
            .then_with(|| a.variable_name.cmp(&b.variable_name))
    });
    Ok(rows)
}

/// A scenario model given as an arithmetic expression over named variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressionScenario {
    #[serde(default)]
    pub name: String,
    /// Label for the model's output, e.g. `total_cost`.
    #[serde(default)]
    pub outcome: String,
    pub expression: String,
    pub variables: Vec<ScenarioVariable>,
}

impl ExpressionScenario {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn run(&self) -> Result<Vec<TornadoRow>, TornadoError> {
        let tree: Node = evalexpr::build_operator_tree(&self.expression)
            .map_err(|e| TornadoError::Expression(e.to_string()))?;
        tornado_analysis(|point| eval_expression(&tree, point), &self.variables)
    }
}

fn eval_expression(tree: &Node, point: &BTreeMap<String, f64>) -> Result<f64, String> {
    let mut ctx = HashMapContext::new();
    for (name, value) in point {
        ctx.set_value(name.clone(), Value::Float(*value))
            .map_err(|e| e.to_string())?;
    }
    match tree.eval_with_context(&ctx).map_err(|e| e.to_string())? {
        Value::Float(v) => Ok(v),
        Value::Int(v) => Ok(v as f64),
        other => Err(format!("expression produced a non-number: {other:?}")),
    }
}

/// One perturbed project field for a portfolio tornado.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub project_id: String,
    pub field: FieldPath,
    pub low: f64,
    pub high: f64,
}

impl Perturbation {
    pub fn variable_name(&self) -> String {
        format!("{}.{}", self.project_id, self.field)
    }
}

fn apply_point(
    portfolio: &ValidatedPortfolio,
    perturbations: &[Perturbation],
    point: &BTreeMap<String, f64>,
) -> Result<ValidatedPortfolio, String> {
    let mut spec = portfolio.spec().clone();
    for p in perturbations {
        let value = point[&p.variable_name()];
        p.field
            .set(&mut spec, &p.project_id, value)
            .map_err(|e| e.to_string())?;
    }
    validate_portfolio(spec).map_err(|e| e.to_string())
}

/// A metric and the fields to perturb, as read from a perturbation file or
/// request body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSet {
    #[serde(default)]
    pub metric: MetricKind,
    pub perturbations: Vec<Perturbation>,
}

impl PerturbationSet {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn run(&self, portfolio: &ValidatedPortfolio, config: &SimConfig) -> Result<Vec<TornadoRow>, TornadoError> {
        portfolio_tornado(portfolio, config, &self.metric, &self.perturbations)
    }
}

/// Tornado of a portfolio metric over perturbed project fields.
///
/// Each perturbation is one variable whose base is the field's current value.
pub fn portfolio_tornado(
    portfolio: &ValidatedPortfolio,
    config: &SimConfig,
    metric: &dyn Metric,
    perturbations: &[Perturbation],
) -> Result<Vec<TornadoRow>, TornadoError> {
    let mut variables = Vec::with_capacity(perturbations.len());
    for p in perturbations {
        let base = p.field.get(portfolio.spec(), &p.project_id)?;
        let name = p.variable_name();
        for value in [p.low, p.high] {
            let mut spec = portfolio.spec().clone();
            p.field.set(&mut spec, &p.project_id, value)?;
            if let Err(errors) = validate_portfolio(spec) {
                return Err(TornadoError::InvalidPerturbation {
                    variable: name,
                    value,
                    errors,
                });
            }
        }
        variables.push(ScenarioVariable::new(name, p.low, base, p.high));
    }

    tornado_analysis(
        |point| {
            let scenario = apply_point(portfolio, perturbations, point)?;
            portfolio_metric(&scenario, config, metric).map_err(|e| e.to_string())
        },
        &variables,
    )
}
