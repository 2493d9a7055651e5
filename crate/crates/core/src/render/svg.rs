use std::fmt::Write;

use super::{fmt_fixed, symmetric_scale, ChartStyle, RenderError};
use crate::pit::PitData;
use crate::tornado::TornadoRow;

const LEFT: f64 = 120.0;
const RIGHT: f64 = 40.0;
const TOP: f64 = 56.0;
const BOTTOM: f64 = 72.0;

fn px(v: f64) -> String {
    fmt_fixed(v, 2)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Plot frame shared by both chart kinds.
struct Frame {
    width: f64,
    height: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(style: &ChartStyle) -> Self {
        let width = f64::from(style.width);
        let height = f64::from(style.height);
        Self {
            width,
            height,
            x0: LEFT,
            x1: width - RIGHT,
            y0: TOP,
            y1: height - BOTTOM,
        }
    }

    fn center_x(&self) -> f64 {
        (self.x0 + self.x1) / 2.0
    }

    fn half_width(&self) -> f64 {
        (self.x1 - self.x0) / 2.0
    }

    fn band(&self, rows: usize) -> f64 {
        (self.y1 - self.y0) / rows as f64
    }
}

fn open_svg(out: &mut String, frame: &Frame, style: &ChartStyle, title: &str) {
    let _ = writeln!(
        out,
        r##"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="{font}" font-size="{fs}">
<rect class="background" x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>
<text class="title" x="{tx}" y="24" text-anchor="middle" font-size="{tfs}" font-weight="bold">{title}</text>"##,
        w = style.width,
        h = style.height,
        font = escape(&style.font_family),
        fs = style.font_size,
        tx = px(frame.width / 2.0),
        tfs = style.font_size + 4,
        title = escape(title),
    );
}

/// Ticks at -1, -1/2, 0, 1/2, 1 of the half-range, labelled in axis units.
fn axis(out: &mut String, frame: &Frame, style: &ChartStyle, center_value: f64, scale: f64, label: &str) {
    let cx = frame.center_x();
    let half = frame.half_width();
    let y = frame.y1;
    let _ = writeln!(
        out,
        r##"<g class="axis"><line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#333333" stroke-width="1"/>"##,
        px(frame.x0),
        px(frame.x1),
        y = px(y),
    );
    for k in [-2i32, -1, 0, 1, 2] {
        let frac = f64::from(k) / 2.0;
        let x = cx + frac * half;
        let _ = writeln!(
            out,
            r##"<line class="tick" x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="#333333" stroke-width="1"/><text class="tick-label" x="{x}" y="{ty}" text-anchor="middle">{v}</text>"##,
            x = px(x),
            y0 = px(y),
            y1 = px(y + 5.0),
            ty = px(y + 18.0),
            v = style.value(center_value + frac * scale),
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle">{}</text></g>"#,
        px(cx),
        px(y + 36.0),
        escape(label),
    );
}

fn center_line(out: &mut String, frame: &Frame) {
    let _ = writeln!(
        out,
        r##"<line class="center-line" x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="#000000" stroke-width="1.5"/>"##,
        x = px(frame.center_x()),
        y0 = px(frame.y0 - 6.0),
        y1 = px(frame.y1),
    );
}

/// Horizontal bar from the center line; `extent` is signed pixels.
#[allow(clippy::too_many_arguments)]
fn bar(out: &mut String, class: &str, cx: f64, extent: f64, y: f64, h: f64, fill: &str, title: &str) {
    let x = if extent < 0.0 { cx + extent } else { cx };
    let _ = writeln!(
        out,
        r#"<rect class="bar {class}" x="{}" y="{}" width="{}" height="{}" fill="{}"><title>{}</title></rect>"#,
        px(x),
        px(y),
        px(extent.abs()),
        px(h),
        escape(fill),
        escape(title),
    );
}

fn value_label(out: &mut String, style: &ChartStyle, cx: f64, extent: f64, y_mid: f64, text: &str) {
    if !style.show_values {
        return;
    }
    let (x, anchor) = if extent < 0.0 {
        (cx + extent - 4.0, "end")
    } else {
        (cx + extent + 4.0, "start")
    };
    let _ = writeln!(
        out,
        r#"<text class="value" x="{}" y="{}" text-anchor="{anchor}" dominant-baseline="middle" font-size="{}">{}</text>"#,
        px(x),
        px(y_mid),
        style.font_size.saturating_sub(2).max(6),
        escape(text),
    );
}

/// Renders PIT data as an SVG document: two bars per project around a
/// center line at the portfolio metric, exclusion above success, rows in
/// PIT order from the top.
pub fn render_pit(data: &PitData, style: &ChartStyle) -> Result<String, RenderError> {
    style.validate()?;
    if data.rows.is_empty() {
        return Err(RenderError::Empty);
    }
    let frame = Frame::new(style);
    let cx = frame.center_x();
    let half = frame.half_width();
    let max_abs = data
        .rows
        .iter()
        .flat_map(|r| [r.delta_exclusion, r.delta_success])
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = symmetric_scale(max_abs, style.value_range);
    let to_px = |v: f64| v / scale * half;

    let mut out = String::new();
    open_svg(
        &mut out,
        &frame,
        style,
        &format!("Project Impact Tornado: {}", data.metric_name),
    );
    let _ = writeln!(
        out,
        r#"<text class="center-value" x="{}" y="{}" text-anchor="middle">{} = {}</text>"#,
        px(cx),
        px(frame.y0 - 12.0),
        escape(&data.metric_name),
        style.value(data.center_value),
    );

    let band = frame.band(data.rows.len());
    let bar_h = band * 0.34;
    for (i, row) in data.rows.iter().enumerate() {
        let top = frame.y0 + band * i as f64;
        let y_ex = top + band * 0.14;
        let y_su = y_ex + bar_h + band * 0.04;
        let _ = writeln!(
            out,
            r#"<g class="pit-row" data-project="{}">"#,
            escape(&row.project_id)
        );
        let _ = writeln!(
            out,
            r#"<text class="row-label" x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            px(frame.x0 - 8.0),
            px(top + band / 2.0),
            escape(&row.project_id),
        );

        match row.delta_exclusion {
            Some(v) => {
                let e = to_px(v);
                bar(&mut out, "exclusion", cx, e, y_ex, bar_h, &style.exclusion_color,
                    &format!("{} exclusion: {}", row.project_id, style.value(v)));
                value_label(&mut out, style, cx, e, y_ex + bar_h / 2.0, &style.value(v));
            }
            None => placeholder(&mut out, "exclusion", cx, y_ex, bar_h, &row.project_id),
        }
        match row.delta_success {
            Some(v) => {
                let e = to_px(v);
                bar(&mut out, "success", cx, e, y_su, bar_h, &style.success_color,
                    &format!("{} success: {}", row.project_id, style.value(v)));
                value_label(&mut out, style, cx, e, y_su + bar_h / 2.0, &style.value(v));
            }
            None => placeholder(&mut out, "success", cx, y_su, bar_h, &row.project_id),
        }
        out.push_str("</g>\n");
    }

    center_line(&mut out, &frame);
    axis(&mut out, &frame, style, data.center_value, scale, &data.metric_name);
    legend(
        &mut out,
        &frame,
        &[
            ("Exclusion", style.exclusion_color.as_str()),
            ("Success", style.success_color.as_str()),
        ],
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Marked stand-in for a bar that could not be computed.
fn placeholder(out: &mut String, kind: &str, cx: f64, y: f64, h: f64, id: &str) {
    let w = 14.0;
    let _ = writeln!(
        out,
        r##"<rect class="bar {kind} unavailable" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#888888" stroke-dasharray="3,2"><title>{} {kind}: not available</title></rect><text class="unavailable-mark" x="{}" y="{}" dominant-baseline="middle" font-size="9">n/a</text>"##,
        px(cx - w / 2.0),
        px(y),
        px(w),
        px(h),
        escape(id),
        px(cx + w / 2.0 + 3.0),
        px(y + h / 2.0),
    );
}

fn legend(out: &mut String, frame: &Frame, items: &[(&str, &str)]) {
    let y = frame.height - 14.0;
    let mut x = frame.x0;
    out.push_str("<g class=\"legend\">\n");
    for (label, color) in items {
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{}" dominant-baseline="middle">{}</text>"#,
            px(x),
            px(y - 6.0),
            escape(color),
            px(x + 16.0),
            px(y),
            escape(label),
        );
        x += 110.0;
    }
    out.push_str("</g>\n");
}

/// Renders tornado rows as an SVG document: one bar per variable spanning
/// its outcome range around a center line at the base outcome, in the
/// given (widest-first) order.
pub fn render_tornado(rows: &[TornadoRow], outcome: &str, style: &ChartStyle) -> Result<String, RenderError> {
    style.validate()?;
    let Some(first) = rows.first() else {
        return Err(RenderError::Empty);
    };
    let base = first.outcome_base;
    let frame = Frame::new(style);
    let cx = frame.center_x();
    let half = frame.half_width();
    let max_dev = rows
        .iter()
        .map(|r| (r.max_outcome() - base).abs().max((r.min_outcome() - base).abs()))
        .fold(0.0f64, f64::max);
    let scale = symmetric_scale(max_dev, style.value_range);
    let to_px = |v: f64| (v - base) / scale * half;

    let mut out = String::new();
    open_svg(&mut out, &frame, style, &format!("Tornado: {outcome}"));
    let _ = writeln!(
        out,
        r#"<text class="center-value" x="{}" y="{}" text-anchor="middle">base = {}</text>"#,
        px(cx),
        px(frame.y0 - 12.0),
        style.value(base),
    );

    let band = frame.band(rows.len());
    let bar_h = band * 0.6;
    for (i, r) in rows.iter().enumerate() {
        let top = frame.y0 + band * i as f64;
        let y = top + band * 0.2;
        let lo = to_px(r.min_outcome());
        let hi = to_px(r.max_outcome());
        let _ = writeln!(
            out,
            r#"<g class="tornado-row" data-variable="{}">"#,
            escape(&r.variable_name)
        );
        let _ = writeln!(
            out,
            r#"<text class="row-label" x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            px(frame.x0 - 8.0),
            px(top + band / 2.0),
            escape(&r.variable_name),
        );
        let _ = writeln!(
            out,
            r#"<rect class="bar tornado" x="{}" y="{}" width="{}" height="{}" fill="{}"><title>{}: low {} / high {} (span {})</title></rect>"#,
            px(cx + lo),
            px(y),
            px(hi - lo),
            px(bar_h),
            escape(&style.tornado_color),
            escape(&r.variable_name),
            style.value(r.outcome_low),
            style.value(r.outcome_high),
            style.value(r.span),
        );
        if style.show_values {
            for (x, anchor, v) in [
                (cx + lo - 4.0, "end", r.min_outcome()),
                (cx + hi + 4.0, "start", r.max_outcome()),
            ] {
                let _ = writeln!(
                    out,
                    r#"<text class="value" x="{}" y="{}" text-anchor="{anchor}" dominant-baseline="middle">{}</text>"#,
                    px(x),
                    px(y + bar_h / 2.0),
                    style.value(v),
                );
            }
        }
        out.push_str("</g>\n");
    }

    center_line(&mut out, &frame);
    axis(&mut out, &frame, style, base, scale, outcome);
    out.push_str("</svg>\n");
    Ok(out)
}
