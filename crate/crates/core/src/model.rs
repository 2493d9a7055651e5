//! Portfolio, project, and simulation configuration types.
//!
//! The serde shapes here are the on-disk file formats. Values are kept as
//! parsed (durations included) so that validation can report every problem
//! in one pass instead of failing on the first malformed field.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Diagnostic, ValidationErrors};

/// Development phases in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PhaseId {
    Ph1,
    Ph2,
    Ph3,
    Reg,
}

impl PhaseId {
    pub const ALL: [PhaseId; 4] = [PhaseId::Ph1, PhaseId::Ph2, PhaseId::Ph3, PhaseId::Reg];

    pub fn as_str(self) -> &'static str {
        match self {
            PhaseId::Ph1 => "Ph1",
            PhaseId::Ph2 => "Ph2",
            PhaseId::Ph3 => "Ph3",
            PhaseId::Reg => "Reg",
        }
    }
}

impl fmt::Display for PhaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhaseId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ph1" | "phase1" => Ok(PhaseId::Ph1),
            "ph2" | "phase2" => Ok(PhaseId::Ph2),
            "ph3" | "phase3" => Ok(PhaseId::Ph3),
            "reg" | "registration" => Ok(PhaseId::Reg),
            _ => Err(format!("unknown phase '{s}' (expected Ph1, Ph2, Ph3 or Reg)")),
        }
    }
}

/// One remaining development phase of a project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub phase: PhaseId,
    /// Whole years; stored as parsed so fractional input can be diagnosed.
    pub duration: f64,
    /// Total phase cost, spread evenly over its years.
    pub cost: f64,
    /// Probability of passing the gate at the end of the phase.
    pub pos: f64,
}

impl PhaseSpec {
    pub fn new(phase: PhaseId, duration: u32, cost: f64, pos: f64) -> Self {
        Self {
            phase,
            duration: f64::from(duration),
            cost,
            pos,
        }
    }

    /// Duration in whole years. Only meaningful on validated input.
    pub fn duration_years(&self) -> usize {
        self.duration as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectSpec {
    pub id: String,
    #[serde(default)]
    pub name: String,
    /// Annual revenue at peak, per year on the market.
    pub peak_sales: f64,
    pub phases: Vec<PhaseSpec>,
}

impl ProjectSpec {
    pub fn phase(&self, id: PhaseId) -> Option<&PhaseSpec> {
        self.phases.iter().find(|p| p.phase == id)
    }

    pub fn phase_mut(&mut self, id: PhaseId) -> Option<&mut PhaseSpec> {
        self.phases.iter_mut().find(|p| p.phase == id)
    }

    /// Years from the start of the first remaining phase to the end of Reg.
    pub fn development_years(&self) -> usize {
        self.phases.iter().map(PhaseSpec::duration_years).sum()
    }

    /// Probability of passing every remaining gate.
    pub fn success_probability(&self) -> f64 {
        self.phases.iter().map(|p| p.pos).product()
    }

    pub fn display_name(&self) -> &str {
        if self.name.is_empty() {
            &self.id
        } else {
            &self.name
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioSpec {
    #[serde(default)]
    pub name: String,
    pub projects: Vec<ProjectSpec>,
}

impl PortfolioSpec {
    pub fn project(&self, id: &str) -> Option<&ProjectSpec> {
        self.projects.iter().find(|p| p.id == id)
    }

    pub fn project_mut(&mut self, id: &str) -> Option<&mut ProjectSpec> {
        self.projects.iter_mut().find(|p| p.id == id)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("portfolio serializes")
    }
}

/// A portfolio whose every invariant has been checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidatedPortfolio(PortfolioSpec);

impl ValidatedPortfolio {
    pub fn new(spec: PortfolioSpec) -> Result<Self, ValidationErrors> {
        validate_portfolio(spec)
    }

    pub fn spec(&self) -> &PortfolioSpec {
        &self.0
    }

    pub fn projects(&self) -> &[ProjectSpec] {
        &self.0.projects
    }

    pub fn project(&self, id: &str) -> Option<&ProjectSpec> {
        self.0.project(id)
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn len(&self) -> usize {
        self.0.projects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.projects.is_empty()
    }

    pub fn into_inner(self) -> PortfolioSpec {
        self.0
    }
}

impl<'de> Deserialize<'de> for ValidatedPortfolio {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let spec = PortfolioSpec::deserialize(deserializer)?;
        validate_portfolio(spec).map_err(serde::de::Error::custom)
    }
}

/// Which estimator produces project expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    #[default]
    MonteCarlo,
    Analytic,
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::MonteCarlo => "monte_carlo",
            EngineKind::Analytic => "analytic",
        })
    }
}

impl FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "monte_carlo" | "mc" => Ok(EngineKind::MonteCarlo),
            "analytic" => Ok(EngineKind::Analytic),
            _ => Err(format!("unknown engine '{s}' (expected monte_carlo or analytic)")),
        }
    }
}

/// How iteration uniforms are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// One uniform per iteration from its own stratum of [0, 1), strata
    /// assigned to iterations in seeded random order; the gates consume it
    /// sequentially.
    #[default]
    Stratified,
    /// A fresh uniform for every gate.
    Independent,
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampling::Stratified => "stratified",
            Sampling::Independent => "independent",
        })
    }
}

impl FromStr for Sampling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "stratified" => Ok(Sampling::Stratified),
            "independent" => Ok(Sampling::Independent),
            _ => Err(format!("unknown sampling '{s}' (expected stratified or independent)")),
        }
    }
}

pub const DEFAULT_ITERATIONS: usize = 200_000;
pub const MAX_ITERATIONS: usize = 100_000_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MARKET_YEARS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub iterations: usize,
    pub seed: u64,
    /// Annual discount rate as a fraction.
    pub discount_rate: f64,
    /// Years of revenue after launch.
    pub market_years: u32,
    /// Years of linear ramp-up to peak sales; 0 is flat.
    pub ramp_years: u32,
    pub engine: EngineKind,
    pub sampling: Sampling,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            iterations: DEFAULT_ITERATIONS,
            seed: DEFAULT_SEED,
            discount_rate: 0.0,
            market_years: DEFAULT_MARKET_YEARS,
            ramp_years: 0,
            engine: EngineKind::MonteCarlo,
            sampling: Sampling::Stratified,
        }
    }
}

impl SimConfig {
    pub fn analytic() -> Self {
        Self {
            engine: EngineKind::Analytic,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ValidationErrors> {
        let mut diags = Vec::new();
        if self.iterations == 0 {
            diags.push(Diagnostic::config("iterations", "must be at least 1"));
        }
        if self.iterations > MAX_ITERATIONS {
            diags.push(Diagnostic::config(
                "iterations",
                format!("must be at most {MAX_ITERATIONS}, got {}", self.iterations),
            ));
        }
        if !self.discount_rate.is_finite() || self.discount_rate < 0.0 {
            diags.push(Diagnostic::config(
                "discount_rate",
                format!("must be a finite non-negative rate, got {}", self.discount_rate),
            ));
        }
        if self.ramp_years > self.market_years {
            diags.push(Diagnostic::config(
                "ramp_years",
                format!(
                    "ramp_years ({}) exceeds market_years ({})",
                    self.ramp_years, self.market_years
                ),
            ));
        }
        ValidationErrors::from_vec(diags)
    }
}

/// Checks every portfolio invariant and reports all violations together.
pub fn validate_portfolio(spec: PortfolioSpec) -> Result<ValidatedPortfolio, ValidationErrors> {
    let mut diags = Vec::new();

    if spec.projects.is_empty() {
        diags.push(Diagnostic::portfolio("projects", "portfolio has no projects"));
    }

    let mut seen = BTreeSet::new();
    for project in &spec.projects {
        if project.id.trim().is_empty() {
            diags.push(Diagnostic::project(&project.id, "id", "project id is empty"));
        } else if !seen.insert(project.id.as_str()) {
            diags.push(Diagnostic::project(&project.id, "id", "duplicate id"));
        }
        check_project(project, &mut diags);
    }

    match ValidationErrors::from_vec(diags) {
        Ok(()) => Ok(ValidatedPortfolio(spec)),
        Err(e) => Err(e),
    }
}

fn check_project(project: &ProjectSpec, diags: &mut Vec<Diagnostic>) {
    let id = project.id.as_str();

    if !project.peak_sales.is_finite() || project.peak_sales < 0.0 {
        diags.push(Diagnostic::project(
            id,
            "peak_sales",
            format!("must be a finite non-negative amount, got {}", project.peak_sales),
        ));
    }

    if project.phases.is_empty() {
        diags.push(Diagnostic::project(id, "phases", "empty phase list"));
        return;
    }

    let in_order = project.phases.windows(2).all(|w| w[0].phase < w[1].phase);
    if !in_order {
        let order: Vec<_> = project.phases.iter().map(|p| p.phase.as_str()).collect();
        diags.push(Diagnostic::project(
            id,
            "phases",
            format!(
                "phase order violation: [{}] is not strictly increasing in Ph1 < Ph2 < Ph3 < Reg",
                order.join(", ")
            ),
        ));
    }
    if project.phases.last().map(|p| p.phase) != Some(PhaseId::Reg) {
        diags.push(Diagnostic::project(id, "phases", "phase list must end with Reg"));
    }

    for phase in &project.phases {
        let field = |name: &str| format!("{}.{}", phase.phase, name);
        let d = phase.duration;
        if !d.is_finite() || d < 1.0 {
            diags.push(Diagnostic::project(
                id,
                field("duration"),
                format!("must be a whole number of years >= 1, got {d}"),
            ));
        } else if d.fract() != 0.0 {
            diags.push(Diagnostic::project(
                id,
                field("duration"),
                format!("fractional durations are not supported, got {d}"),
            ));
        } else if d > f64::from(u16::MAX) {
            diags.push(Diagnostic::project(
                id,
                field("duration"),
                format!("duration {d} is unreasonably long"),
            ));
        }
        if !phase.cost.is_finite() || phase.cost < 0.0 {
            diags.push(Diagnostic::project(
                id,
                field("cost"),
                format!("must be a finite non-negative amount, got {}", phase.cost),
            ));
        }
        if !(phase.pos > 0.0 && phase.pos <= 1.0) {
            diags.push(Diagnostic::project(
                id,
                field("pos"),
                format!("success probability must be in (0, 1], got {}", phase.pos),
            ));
        }
    }
}
