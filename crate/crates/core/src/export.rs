//! Tabular (CSV) and structured (JSON) serializations of analysis results.

use serde::{Deserialize, Serialize};

use crate::pit::{PitData, PitRow};
use crate::tornado::TornadoRow;

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn flags(row: &PitRow) -> String {
    row.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>().join(";")
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv output is utf-8")
}

/// PIT rows as CSV, preceded by a `#` line carrying metric name and center value.
pub fn pit_to_csv(data: &PitData) -> String {
    let mut out = format!(
        "# metric: {}, center_value: {}\n",
        data.metric_name, data.center_value
    );
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "rank",
        "project_id",
        "delta_exclusion",
        "delta_success",
        "project_metric",
        "flags",
    ])
    .expect("in-memory write");
    for (i, r) in data.rows.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            r.project_id.clone(),
            num(r.delta_exclusion),
            num(r.delta_success),
            num(r.project_metric),
            flags(r),
        ])
        .expect("in-memory write");
    }
    out.push_str(&finish(w));
    out
}

pub fn pit_to_json(data: &PitData) -> String {
    serde_json::to_string_pretty(data).expect("PIT data serializes")
}

/// Tornado rows as CSV, preceded by a `#` line with the outcome label and base value.
pub fn tornado_to_csv(outcome: &str, rows: &[TornadoRow]) -> String {
    let base = rows.first().map(|r| r.outcome_base.to_string()).unwrap_or_default();
    let mut out = format!("# outcome: {outcome}, base: {base}\n");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["rank", "variable", "outcome_low", "outcome_base", "outcome_high", "span"])
        .expect("in-memory write");
    for (i, r) in rows.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            r.variable_name.clone(),
            r.outcome_low.to_string(),
            r.outcome_base.to_string(),
            r.outcome_high.to_string(),
            r.span.to_string(),
        ])
        .expect("in-memory write");
    }
    out.push_str(&finish(w));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TornadoReport {
    pub outcome: String,
    pub base_value: Option<f64>,
    pub rows: Vec<TornadoRow>,
}

impl TornadoReport {
    pub fn new(outcome: impl Into<String>, rows: Vec<TornadoRow>) -> Self {
        Self {
            outcome: outcome.into(),
            base_value: rows.first().map(|r| r.outcome_base),
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tornado report serializes")
    }

    pub fn to_csv(&self) -> String {
        tornado_to_csv(&self.outcome, &self.rows)
    }
}

/// One project's bars in the baseline and the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub project_id: String,
    pub baseline_exclusion: Option<f64>,
    pub scenario_exclusion: Option<f64>,
    pub change_exclusion: Option<f64>,
    pub baseline_success: Option<f64>,
    pub scenario_success: Option<f64>,
    pub change_success: Option<f64>,
}

/// Baseline and what-if PIT data side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfReport {
    pub baseline: PitData,
    pub scenario: PitData,
    pub center_change: f64,
    /// In baseline plot order.
    pub comparison: Vec<ComparisonRow>,
}

impl WhatIfReport {
    pub fn new(baseline: PitData, scenario: PitData) -> Self {
        let diff = |a: Option<f64>, b: Option<f64>| Some(b? - a?);
        let comparison = baseline
            .rows
            .iter()
            .map(|b| {
                let s = scenario.row(&b.project_id);
                let se = s.and_then(|r| r.delta_exclusion);
                let ss = s.and_then(|r| r.delta_success);
                ComparisonRow {
                    project_id: b.project_id.clone(),
                    baseline_exclusion: b.delta_exclusion,
                    scenario_exclusion: se,
                    change_exclusion: diff(b.delta_exclusion, se),
                    baseline_success: b.delta_success,
                    scenario_success: ss,
                    change_success: diff(b.delta_success, ss),
                }
            })
            .collect();
        Self {
            center_change: scenario.center_value - baseline.center_value,
            baseline,
            scenario,
            comparison,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("what-if report serializes")
    }

    /// Both PIT tables, then the comparison table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# baseline\n");
        out.push_str(&pit_to_csv(&self.baseline));
        out.push_str("# scenario\n");
        out.push_str(&pit_to_csv(&self.scenario));
        out.push_str(&format!(
            "# comparison, center_change: {}\n",
            self.center_change
        ));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "project_id",
            "baseline_exclusion",
            "scenario_exclusion",
            "change_exclusion",
            "baseline_success",
            "scenario_success",
            "change_success",
        ])
        .expect("in-memory write");
        for c in &self.comparison {
            w.write_record([
                c.project_id.clone(),
                num(c.baseline_exclusion),
                num(c.scenario_exclusion),
                num(c.change_exclusion),
                num(c.baseline_success),
                num(c.scenario_success),
                num(c.change_success),
            ])
            .expect("in-memory write");
        }
        out.push_str(&finish(w));
        out
    }
}
