#![allow(dead_code)]

use pitplot_core::{MetricKind, PitData, ProjectSpec, SimConfig};

/// Independent closed form of the phase-gate cash-flow model, written phase by
/// phase rather than year by year.
pub fn oracle(project: &ProjectSpec, config: &SimConfig) -> (f64, f64, f64) {
    let v = |t: usize| (1.0 + config.discount_rate).powi(-(t as i32));
    let mut year = 0usize;
    let mut reach = 1.0;
    let mut expected_cost = 0.0;
    for phase in &project.phases {
        let d = phase.duration as usize;
        let annual = phase.cost / d as f64;
        let pv: f64 = (year..year + d).map(v).sum::<f64>() * annual;
        expected_cost += reach * pv;
        reach *= phase.pos;
        year += d;
    }
    let success = reach;
    let mut launch_revenue = 0.0;
    for k in 0..config.market_years as usize {
        let ramp = if config.ramp_years == 0 {
            1.0
        } else {
            ((k + 1) as f64 / config.ramp_years as f64).min(1.0)
        };
        launch_revenue += project.peak_sales * ramp * v(year + k);
    }
    (success * launch_revenue, expected_cost, success)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Qualitative shape of the illustrative PIT chart under PI.
///
/// Returns the list of violated sub-patterns (empty when all hold).
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn termination_pattern_violations(data: &PitData) -> Vec<String> {
    let mut out = Vec::new();
    let ex = |id: &str| data.row(id).and_then(|r| r.delta_exclusion).unwrap_or(f64::NAN);
    let su = |id: &str| data.row(id).and_then(|r| r.delta_success).unwrap_or(f64::NAN);

    if data.metric_name != MetricKind::Pi.as_str() {
        out.push(format!("metric is {}, expected pi", data.metric_name));
    }
    for id in ["P4", "P8"] {
        if !(ex(id) < 0.0) {
            out.push(format!("{id} exclusion bar not negative ({:.4})", ex(id)));
        }
    }
    let order = data.order();
    let bottom: Vec<&str> = order.iter().rev().take(2).copied().collect();
    if !(bottom.contains(&"P1") && bottom.contains(&"P5")) {
        out.push(format!("bottom two rows are {bottom:?}, expected P1 and P5"));
    }
    for id in ["P1", "P5"] {
        if !(ex(id) > 0.0) {
            out.push(format!("{id} exclusion bar not positive ({:.4})", ex(id)));
        }
    }
    let mut by_success: Vec<(&str, f64)> = data
        .rows
        .iter()
        .filter_map(|r| r.delta_success.map(|v| (r.project_id.as_str(), v)))
        .collect();
    by_success.sort_by(|a, b| b.1.total_cmp(&a.1));
    let top: Vec<&str> = by_success.iter().take(2).map(|x| x.0).collect();
    if !(top.contains(&"P9") && top.contains(&"P6")) {
        out.push(format!("largest success bars are {top:?}, expected P9 and P6"));
    }
    if !(ex("P5") > su("P5")) {
        out.push(format!(
            "P5 exclusion bar ({:.4}) not larger than its success bar ({:.4})",
            ex("P5"),
            su("P5")
        ));
    }
    out
}
