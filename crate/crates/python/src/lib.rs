//! Python module `pitplot`: load portfolios, run PIT and tornado analyses,
//! and render charts from Python.

use std::collections::{BTreeMap, BTreeSet};

use pitplot_core::export::{pit_to_csv, pit_to_json, tornado_to_csv};
use pitplot_core::metrics::{enpv, productivity_index, project_totals};
use pitplot_core::render::{render_pit, render_text, render_tornado, render_tornado_text};
use pitplot_core::tornado::ExpressionScenario;
use pitplot_core::whatif::FieldOverride;
use pitplot_core::{
    analytic_expectation, load_config, load_portfolio, run_pit, run_whatif, simulate_portfolio,
    tornado_analysis, ChartStyle, EngineKind, MetricKind, PerturbationSet, PitData, Sampling,
    ScenarioVariable, SimConfig, TornadoReport, TornadoRow, ValidatedPortfolio, WhatIf,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyKeyError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pitplot, PitplotError, PyException, "Base class for pitplot errors.");
create_exception!(pitplot, ValidationError, PitplotError, "Invalid portfolio, config or request.");
create_exception!(pitplot, NotFoundError, PitplotError, "Unknown project id or field.");
create_exception!(pitplot, ComputationError, PitplotError, "A metric is undefined for the inputs.");

fn py_err(e: pitplot_core::Error) -> PyErr {
    use pitplot_core::ErrorClass::*;
    let msg = e.to_string();
    match e.class() {
        Validation => ValidationError::new_err(msg),
        NotFound => NotFoundError::new_err(msg),
        Domain => ComputationError::new_err(msg),
        Io => PitplotError::new_err(msg),
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(ValidationError::new_err)
}

/// A validated portfolio of phase-gated projects.
#[pyclass(name = "Portfolio", module = "pitplot", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPortfolio {
    inner: ValidatedPortfolio,
}

#[pymethods]
impl PyPortfolio {
    #[staticmethod]
    #[pyo3(signature = (text, source="<string>"))]
    fn from_json(text: &str, source: &str) -> PyResult<Self> {
        Ok(Self {
            inner: load_portfolio(text, source).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PitplotError::new_err(format!("{path}: {e}")))?;
        Self::from_json(&text, path)
    }

    /// The bundled ten-project example portfolio.
    #[staticmethod]
    fn example() -> Self {
        Self {
            inner: pitplot_core::fixtures::example_portfolio(),
        }
    }

    fn to_json(&self) -> String {
        self.inner.spec().to_json_pretty()
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn project_ids(&self) -> Vec<String> {
        self.inner.projects().iter().map(|p| p.id.clone()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Portfolio({:?}, {} projects)", self.inner.name(), self.inner.len())
    }

    /// A new portfolio with projects removed, launches guaranteed, or fields
    /// overridden. `overrides` maps "ID:FIELD" (e.g. "P4:Ph3.pos") to values.
    #[pyo3(signature = (exclude=None, force_success=None, overrides=None))]
    fn whatif(
        &self,
        exclude: Option<Vec<String>>,
        force_success: Option<Vec<String>>,
        overrides: Option<BTreeMap<String, f64>>,
    ) -> PyResult<Self> {
        let w = build_whatif(exclude, force_success, overrides)?;
        let inner = pitplot_core::apply_whatif(&self.inner, &w).map_err(|e| py_err(e.into()))?;
        Ok(Self { inner })
    }
}

fn build_whatif(
    exclude: Option<Vec<String>>,
    force_success: Option<Vec<String>>,
    overrides: Option<BTreeMap<String, f64>>,
) -> PyResult<WhatIf> {
    let mut w = WhatIf {
        exclusions: exclude.unwrap_or_default().into_iter().collect::<BTreeSet<_>>(),
        forced_success: force_success.unwrap_or_default().into_iter().collect(),
        overrides: Vec::new(),
    };
    for (key, value) in overrides.unwrap_or_default() {
        let (id, field) = key
            .split_once(':')
            .ok_or_else(|| ValidationError::new_err(format!("override key '{key}': expected ID:FIELD")))?;
        w.overrides.push(FieldOverride {
            project_id: id.to_string(),
            field: field.parse().map_err(|e| ValidationError::new_err(format!("{e}")))?,
            value,
        });
    }
    Ok(w)
}

/// Simulation settings; every argument is optional.
#[pyclass(name = "Config", module = "pitplot", skip_from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: SimConfig,
}

#[pymethods]
impl PyConfig {
    #[new]
    #[pyo3(signature = (*, iterations=None, seed=None, discount_rate=None, market_years=None, ramp_years=None, engine=None, sampling=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        iterations: Option<usize>,
        seed: Option<u64>,
        discount_rate: Option<f64>,
        market_years: Option<u32>,
        ramp_years: Option<u32>,
        engine: Option<&str>,
        sampling: Option<&str>,
    ) -> PyResult<Self> {
        let mut c = SimConfig::default();
        if let Some(v) = iterations {
            c.iterations = v;
        }
        if let Some(v) = seed {
            c.seed = v;
        }
        if let Some(v) = discount_rate {
            c.discount_rate = v;
        }
        if let Some(v) = market_years {
            c.market_years = v;
        }
        if let Some(v) = ramp_years {
            c.ramp_years = v;
        }
        if let Some(v) = engine {
            c.engine = parse::<EngineKind>(v)?;
        }
        if let Some(v) = sampling {
            c.sampling = parse::<Sampling>(v)?;
        }
        c.validate().map_err(|e| py_err(e.into()))?;
        Ok(Self { inner: c })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: load_config(text, "<string>").map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("config serializes")
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn discount_rate(&self) -> f64 {
        self.inner.discount_rate
    }

    #[getter]
    fn market_years(&self) -> u32 {
        self.inner.market_years
    }

    #[getter]
    fn engine(&self) -> String {
        self.inner.engine.to_string()
    }

    fn __repr__(&self) -> String {
        format!(
            "Config(iterations={}, seed={}, discount_rate={}, market_years={}, ramp_years={}, engine={:?}, sampling={:?})",
            self.inner.iterations,
            self.inner.seed,
            self.inner.discount_rate,
            self.inner.market_years,
            self.inner.ramp_years,
            self.inner.engine.to_string(),
            self.inner.sampling.to_string(),
        )
    }
}

fn config_or_default(config: Option<&PyConfig>) -> SimConfig {
    config.map(|c| c.inner.clone()).unwrap_or_default()
}

/// One project row of a PIT-plot.
#[pyclass(name = "PitRow", module = "pitplot", frozen, get_all)]
struct PyPitRow {
    project_id: String,
    delta_exclusion: Option<f64>,
    delta_success: Option<f64>,
    project_metric: Option<f64>,
    diagnostics: Vec<String>,
}

#[pymethods]
impl PyPitRow {
    fn __repr__(&self) -> String {
        format!(
            "PitRow({:?}, exclusion={:?}, success={:?})",
            self.project_id, self.delta_exclusion, self.delta_success
        )
    }
}

/// PIT-plot data: center metric value and one row per project, ordered by
/// exclusion impact (most negative first).
#[pyclass(name = "PitResult", module = "pitplot", frozen)]
struct PyPitResult {
    inner: PitData,
}

#[pymethods]
impl PyPitResult {
    #[getter]
    fn metric(&self) -> String {
        self.inner.metric_name.clone()
    }

    #[getter]
    fn center_value(&self) -> f64 {
        self.inner.center_value
    }

    #[getter]
    fn order(&self) -> Vec<String> {
        self.inner.order().into_iter().map(String::from).collect()
    }

    #[getter]
    fn rows(&self) -> Vec<PyPitRow> {
        self.inner
            .rows
            .iter()
            .map(|r| PyPitRow {
                project_id: r.project_id.clone(),
                delta_exclusion: r.delta_exclusion,
                delta_success: r.delta_success,
                project_metric: r.project_metric,
                diagnostics: r.diagnostics.clone(),
            })
            .collect()
    }

    fn row(&self, project_id: &str) -> PyResult<PyPitRow> {
        self.rows()
            .into_iter()
            .find(|r| r.project_id == project_id)
            .ok_or_else(|| PyKeyError::new_err(project_id.to_string()))
    }

    fn to_json(&self) -> String {
        pit_to_json(&self.inner)
    }

    fn to_csv(&self) -> String {
        pit_to_csv(&self.inner)
    }

    fn to_text(&self) -> String {
        render_text(&self.inner)
    }

    /// SVG chart; `style` is a JSON object of chart style fields.
    #[pyo3(signature = (style=None))]
    fn to_svg(&self, style: Option<&str>) -> PyResult<String> {
        render_pit(&self.inner, &chart_style(style)?).map_err(|e| py_err(e.into()))
    }

    fn __repr__(&self) -> String {
        format!(
            "PitResult(metric={:?}, center_value={}, rows={})",
            self.inner.metric_name,
            self.inner.center_value,
            self.inner.rows.len()
        )
    }
}

fn chart_style(style: Option<&str>) -> PyResult<ChartStyle> {
    match style {
        None => Ok(ChartStyle::default()),
        Some(s) => serde_json::from_str(s).map_err(|e| ValidationError::new_err(format!("style: {e}"))),
    }
}

/// Tornado analysis result, widest bar first.
#[pyclass(name = "TornadoResult", module = "pitplot", frozen)]
struct PyTornadoResult {
    inner: TornadoReport,
}

#[pymethods]
impl PyTornadoResult {
    #[getter]
    fn outcome(&self) -> String {
        self.inner.outcome.clone()
    }

    #[getter]
    fn base_value(&self) -> Option<f64> {
        self.inner.base_value
    }

    /// `(variable, low outcome, base outcome, high outcome, span)` tuples.
    #[getter]
    fn rows(&self) -> Vec<(String, f64, f64, f64, f64)> {
        self.inner
            .rows
            .iter()
            .map(|r| (r.variable_name.clone(), r.outcome_low, r.outcome_base, r.outcome_high, r.span))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_csv(&self) -> String {
        tornado_to_csv(&self.inner.outcome, &self.inner.rows)
    }

    fn to_text(&self) -> String {
        render_tornado_text(&self.inner.rows, &self.inner.outcome)
    }

    #[pyo3(signature = (style=None))]
    fn to_svg(&self, style: Option<&str>) -> PyResult<String> {
        render_tornado(&self.inner.rows, &self.inner.outcome, &chart_style(style)?).map_err(|e| py_err(e.into()))
    }
}

fn tornado_result(outcome: impl Into<String>, rows: Vec<TornadoRow>) -> PyTornadoResult {
    PyTornadoResult {
        inner: TornadoReport::new(outcome, rows),
    }
}

/// Validation findings for a portfolio document as `(project_id, field,
/// message)` tuples; empty when valid.
#[pyfunction]
fn validate(text: &str) -> PyResult<Vec<(Option<String>, String, String)>> {
    match load_portfolio(text, "<string>") {
        Ok(_) => Ok(Vec::new()),
        Err(pitplot_core::Error::Validation(v)) => Ok(v
            .iter()
            .map(|d| (d.project_id.clone(), d.field.clone(), d.message.clone()))
            .collect()),
        Err(e) => Err(py_err(e)),
    }
}

/// Closed-form expectations for one project.
#[pyfunction]
#[pyo3(signature = (portfolio, project_id, config=None))]
fn expectation<'py>(
    py: Python<'py>,
    portfolio: &PyPortfolio,
    project_id: &str,
    config: Option<&PyConfig>,
) -> PyResult<Bound<'py, PyDict>> {
    let project = portfolio
        .inner
        .project(project_id)
        .ok_or_else(|| NotFoundError::new_err(format!("unknown project id '{project_id}'")))?;
    let e = analytic_expectation(project, &config_or_default(config));
    let d = PyDict::new(py);
    d.set_item("expected_revenue", e.expected_revenue)?;
    d.set_item("expected_cost", e.expected_cost)?;
    d.set_item("success_prob", e.success_prob)?;
    d.set_item("conditional_revenue", e.conditional_revenue)?;
    d.set_item("conditional_cost", e.conditional_cost)?;
    Ok(d)
}

/// Monte Carlo summary per project: `{id: {success_fraction, mean_revenue,
/// mean_cost, enpv, pi}}`.
#[pyfunction]
#[pyo3(signature = (portfolio, config=None))]
fn simulate<'py>(py: Python<'py>, portfolio: &PyPortfolio, config: Option<&PyConfig>) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config_or_default(config);
    let p = portfolio.inner.clone();
    let sets = py.detach(move || simulate_portfolio(&p, &cfg));
    let out = PyDict::new(py);
    for cf in &sets {
        let t = project_totals(cf);
        let d = PyDict::new(py);
        d.set_item("success_fraction", cf.success_fraction())?;
        d.set_item("mean_revenue", t.revenue)?;
        d.set_item("mean_cost", t.cost)?;
        d.set_item("enpv", enpv(&t))?;
        d.set_item("pi", productivity_index(&t).ok())?;
        out.set_item(cf.project_id(), d)?;
    }
    Ok(out)
}

/// PIT-plot data for `metric` ("pi" or "enpv").
#[pyfunction]
#[pyo3(signature = (portfolio, metric="pi", config=None))]
fn pit(py: Python<'_>, portfolio: &PyPortfolio, metric: &str, config: Option<&PyConfig>) -> PyResult<PyPitResult> {
    let metric = parse::<MetricKind>(metric)?;
    let cfg = config_or_default(config);
    let p = portfolio.inner.clone();
    let data = py.detach(move || run_pit(&p, &cfg, &metric)).map_err(py_err)?;
    Ok(PyPitResult { inner: data })
}

/// Baseline and scenario PIT-plots as a JSON document with a comparison
/// table.
#[pyfunction]
#[pyo3(signature = (portfolio, exclude=None, force_success=None, overrides=None, metric="pi", config=None))]
fn whatif(
    py: Python<'_>,
    portfolio: &PyPortfolio,
    exclude: Option<Vec<String>>,
    force_success: Option<Vec<String>>,
    overrides: Option<BTreeMap<String, f64>>,
    metric: &str,
    config: Option<&PyConfig>,
) -> PyResult<(PyPitResult, PyPitResult, String)> {
    let metric = parse::<MetricKind>(metric)?;
    let w = build_whatif(exclude, force_success, overrides)?;
    let cfg = config_or_default(config);
    let p = portfolio.inner.clone();
    let report = py.detach(move || run_whatif(&p, &cfg, &w, &metric)).map_err(py_err)?;
    let json = report.to_json();
    Ok((PyPitResult { inner: report.baseline }, PyPitResult { inner: report.scenario }, json))
}

/// Tornado over a Python model. `model` receives a dict of variable values
/// and returns a number; `variables` is a list of `(name, low, base, high)`.
#[pyfunction]
#[pyo3(signature = (model, variables, outcome="outcome"))]
fn tornado(
    py: Python<'_>,
    model: Py<PyAny>,
    variables: Vec<(String, f64, f64, f64)>,
    outcome: &str,
) -> PyResult<PyTornadoResult> {
    let vars: Vec<ScenarioVariable> = variables
        .into_iter()
        .map(|(n, l, b, h)| ScenarioVariable::new(n, l, b, h))
        .collect();
    let rows = py
        .detach(|| {
            tornado_analysis(
                |point: &BTreeMap<String, f64>| {
                    Python::attach(|py| -> Result<f64, String> {
                        let d = PyDict::new(py);
                        for (k, v) in point {
                            d.set_item(k, v).map_err(|e| e.to_string())?;
                        }
                        model
                            .call1(py, (d,))
                            .and_then(|r| r.extract::<f64>(py))
                            .map_err(|e| e.to_string())
                    })
                },
                &vars,
            )
        })
        .map_err(|e| py_err(e.into()))?;
    Ok(tornado_result(outcome, rows))
}

/// Tornado of a scenario document (`expression` + `variables`).
#[pyfunction]
fn scenario_tornado(text: &str) -> PyResult<PyTornadoResult> {
    let s = ExpressionScenario::from_json(text).map_err(|e| ValidationError::new_err(e.to_string()))?;
    let rows = s.run().map_err(|e| py_err(e.into()))?;
    Ok(tornado_result(s.outcome, rows))
}

/// Tornado of a portfolio metric over project fields. `perturbations` is a
/// list of `(project_id, field, low, high)`, e.g. `("P4", "Ph3.pos", 0.63, 0.77)`.
#[pyfunction]
#[pyo3(signature = (portfolio, perturbations, metric="pi", config=None))]
fn portfolio_tornado(
    py: Python<'_>,
    portfolio: &PyPortfolio,
    perturbations: Vec<(String, String, f64, f64)>,
    metric: &str,
    config: Option<&PyConfig>,
) -> PyResult<PyTornadoResult> {
    let set = PerturbationSet {
        metric: parse::<MetricKind>(metric)?,
        perturbations: perturbations
            .into_iter()
            .map(|(project_id, field, low, high)| {
                Ok(pitplot_core::Perturbation {
                    project_id,
                    field: field.parse().map_err(|e| ValidationError::new_err(format!("{e}")))?,
                    low,
                    high,
                })
            })
            .collect::<PyResult<_>>()?,
    };
    let cfg = config_or_default(config);
    let p = portfolio.inner.clone();
    let rows = py
        .detach(|| set.run(&p, &cfg))
        .map_err(|e| py_err(e.into()))?;
    Ok(tornado_result(set.metric.as_str(), rows))
}

#[pymodule]
fn pitplot(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("PitplotError", py.get_type::<PitplotError>())?;
    m.add("ValidationError", py.get_type::<ValidationError>())?;
    m.add("NotFoundError", py.get_type::<NotFoundError>())?;
    m.add("ComputationError", py.get_type::<ComputationError>())?;
    m.add_class::<PyPortfolio>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyPitRow>()?;
    m.add_class::<PyPitResult>()?;
    m.add_class::<PyTornadoResult>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(pit, m)?)?;
    m.add_function(wrap_pyfunction!(whatif, m)?)?;
    m.add_function(wrap_pyfunction!(tornado, m)?)?;
    m.add_function(wrap_pyfunction!(scenario_tornado, m)?)?;
    m.add_function(wrap_pyfunction!(portfolio_tornado, m)?)?;
    Ok(())
}
