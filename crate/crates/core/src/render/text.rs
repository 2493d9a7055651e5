use std::fmt::Write;

use super::fmt_fixed;
use crate::pit::PitData;
use crate::tornado::TornadoRow;

/// Width of the bar field; half on each side of the center marker.
pub const TEXT_BAR_COLUMNS: usize = 60;
const HALF: i64 = (TEXT_BAR_COLUMNS / 2) as i64;
const DECIMALS: usize = 4;

/// Cells `lo..hi` (relative to the center, in columns) drawn with `fill`.
fn bar_field(lo: i64, hi: i64, fill: char) -> String {
    let mut s = String::with_capacity(TEXT_BAR_COLUMNS + 1);
    for k in -HALF..HALF {
        if k == 0 {
            s.push('|');
        }
        s.push(if k >= lo && k < hi { fill } else { ' ' });
    }
    s.trim_end().to_string()
}

fn columns(v: f64, scale: f64) -> i64 {
    if scale > 0.0 {
        ((v / scale) * HALF as f64).round().clamp(-HALF as f64, HALF as f64) as i64
    } else {
        0
    }
}

fn signed_bar(v: f64, scale: f64, fill: char) -> String {
    let n = columns(v, scale);
    if n < 0 {
        bar_field(n, 0, fill)
    } else {
        bar_field(0, n, fill)
    }
}

/// Monospace PIT chart: exclusion (`#`) and success (`=`) bars per project.
pub fn render_text(data: &PitData) -> String {
    let max_abs = data
        .rows
        .iter()
        .flat_map(|r| [r.delta_exclusion, r.delta_success])
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = max_abs;
    let id_w = data
        .rows
        .iter()
        .map(|r| r.project_id.chars().count())
        .max()
        .unwrap_or(0)
        .max(7);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "PIT-plot  metric: {}  center value: {}",
        data.metric_name,
        fmt_fixed(data.center_value, DECIMALS)
    );
    let _ = writeln!(
        out,
        "{:id_w$}  {:4} {:>10}  bars: # exclusion, = success; full half-width = {}",
        "project",
        "bar",
        "delta",
        fmt_fixed(scale, DECIMALS)
    );
    for r in &data.rows {
        for (label, value, fill) in [("excl", r.delta_exclusion, '#'), ("succ", r.delta_success, '=')] {
            let (num, bar) = match value {
                Some(v) => (fmt_fixed(v, DECIMALS), signed_bar(v, scale, fill)),
                None => ("n/a".to_string(), bar_field(0, 0, fill)),
            };
            let id = if label == "excl" { r.project_id.as_str() } else { "" };
            let line = format!("{id:id_w$}  {label:4} {num:>10}  {bar}");
            let _ = writeln!(out, "{}", line.trim_end());
        }
    }
    out
}

/// Monospace tornado chart: one bar per variable spanning its outcome range
/// around the base outcome.
pub fn render_tornado_text(rows: &[TornadoRow], outcome: &str) -> String {
    let base = rows.first().map(|r| r.outcome_base).unwrap_or(0.0);
    let max_dev = rows
        .iter()
        .map(|r| (r.max_outcome() - base).abs().max((r.min_outcome() - base).abs()))
        .fold(0.0f64, f64::max);
    let scale = max_dev;
    let name_w = rows
        .iter()
        .map(|r| r.variable_name.chars().count())
        .max()
        .unwrap_or(0)
        .max(8);

    let mut out = String::new();
    let _ = writeln!(out, "Tornado  outcome: {outcome}  base: {}", fmt_fixed(base, DECIMALS));
    let _ = writeln!(
        out,
        "{:name_w$} {:>12} {:>12} {:>12}",
        "variable", "low", "high", "span"
    );
    for r in rows {
        let lo = columns(r.min_outcome() - base, scale);
        let hi = columns(r.max_outcome() - base, scale);
        let line = format!(
            "{:name_w$} {:>12} {:>12} {:>12}  {}",
            r.variable_name,
            fmt_fixed(r.outcome_low, DECIMALS),
            fmt_fixed(r.outcome_high, DECIMALS),
            fmt_fixed(r.span, DECIMALS),
            bar_field(lo, hi, '#'),
        );
        let _ = writeln!(out, "{}", line.trim_end());
    }
    out
}
