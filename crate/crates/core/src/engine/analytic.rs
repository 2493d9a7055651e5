use serde::{Deserialize, Serialize};

use super::schedule::Schedule;
use crate::model::{ProjectSpec, SimConfig};

/// Exact expectations of the phase-gate model for one project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticExpectation {
    pub project_id: String,
    /// Risk-adjusted discounted revenue.
    pub expected_revenue: f64,
    /// Risk-adjusted discounted cost, including sunk cost of failures.
    pub expected_cost: f64,
    /// Probability of passing every remaining gate.
    pub success_prob: f64,
    /// Discounted revenue given a launch.
    pub conditional_revenue: f64,
    /// Discounted cost given a launch (every phase paid).
    pub conditional_cost: f64,
}

/// Closed-form expectation of the same model the Monte Carlo engine samples.
///
/// A phase's cost is paid only if every earlier gate was passed, so each
/// year's cost is weighted by the probability of reaching the phase active
/// in that year. Revenue is paid only on launch.
pub fn analytic_expectation(project: &ProjectSpec, config: &SimConfig) -> AnalyticExpectation {
    let schedule = Schedule::new(project, config);
    let horizon = schedule.horizon();
    let n = schedule.phase_count();

    let reach: Vec<f64> = project
        .phases
        .iter()
        .scan(1.0, |acc, p| {
            let here = *acc;
            *acc *= p.pos;
            Some(here)
        })
        .collect();
    let success_prob = project.phases.iter().fold(1.0, |acc, p| acc * p.pos);

    let cost = schedule.discounted(&schedule.nominal_cost(n, horizon));
    let mut expected_cost = 0.0;
    let mut conditional_cost = 0.0;
    for (t, c) in cost.iter().enumerate() {
        let weight = schedule.phase_at(t).map_or(0.0, |h| reach[h]);
        expected_cost += c * weight;
        conditional_cost += c;
    }

    let revenue = schedule.discounted(&schedule.nominal_revenue(horizon));
    let conditional_revenue = revenue.iter().fold(0.0, |acc, v| acc + v);

    AnalyticExpectation {
        project_id: project.id.clone(),
        expected_revenue: success_prob * conditional_revenue,
        expected_cost,
        success_prob,
        conditional_revenue,
        conditional_cost,
    }
}
