//! Portfolio decision analytics for phase-gated R&D projects.
//!
//! Projects pass a sequence of development phases (Ph1, Ph2, Ph3, Reg), each
//! with a duration, a cost, and a probability of passing its end gate. The
//! [`engine`] turns a portfolio into discounted annual cash flows, either by
//! seeded Monte Carlo sampling or in closed form. [`pit`] measures how each
//! project moves a portfolio metric when it is excluded or when its launch is
//! guaranteed, which is what a Project Impact Tornado (PIT) plot shows.
//! [`tornado`] runs classic one-at-a-time sensitivity analyses, and
//! [`render`] draws both kinds of chart as SVG or plain text.

pub mod engine;
pub mod error;
pub mod export;
pub mod fieldpath;
pub mod fixtures;
pub mod metrics;
pub mod model;
pub mod pit;
pub mod render;
pub mod tornado;
pub mod whatif;

pub use engine::{
    analytic_expectation, simulate_portfolio, simulate_project, AnalyticExpectation, CashFlowSet,
    RandomSubstream,
};
pub use error::{Diagnostic, Error, ErrorClass, Result, ValidationErrors};
pub use fieldpath::FieldPath;
pub use metrics::{discount_factor, Metric, MetricDef, MetricKind, Scope, Totals};
pub use model::{
    validate_portfolio, EngineKind, PhaseId, Sampling, PhaseSpec, PortfolioSpec, ProjectSpec, SimConfig,
    ValidatedPortfolio,
};
pub use export::{TornadoReport, WhatIfReport};
pub use pit::{compute_pit, evaluate_portfolio, run_pit, PitData, PitRow, ProjectEvaluation};
pub use render::ChartStyle;
pub use tornado::{
    portfolio_tornado, tornado_analysis, Perturbation, PerturbationSet, ScenarioVariable, TornadoRow,
};
pub use whatif::{apply_whatif, run_whatif, WhatIf};

/// Parses and validates a portfolio document.
pub fn load_portfolio(text: &str, source_name: &str) -> Result<ValidatedPortfolio> {
    let spec = PortfolioSpec::from_json(text).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })?;
    Ok(validate_portfolio(spec)?)
}

/// Parses and validates a simulation config document.
pub fn load_config(text: &str, source_name: &str) -> Result<SimConfig> {
    let config: SimConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}
