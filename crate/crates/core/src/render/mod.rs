//! SVG and plain-text charts for PIT and tornado data.

mod svg;
mod text;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use svg::{render_pit, render_tornado};
pub use text::{render_text, render_tornado_text, TEXT_BAR_COLUMNS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("nothing to render: no rows")]
    Empty,
    #[error("invalid chart style: {0}")]
    Style(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChartStyle {
    pub width: u32,
    pub height: u32,
    pub exclusion_color: String,
    pub success_color: String,
    pub tornado_color: String,
    pub font_family: String,
    pub font_size: u32,
    /// Decimal places for printed values, 0..=6.
    pub decimals: u8,
    pub show_values: bool,
    /// Fixed half-width of the value axis. `None` scales to the largest bar
    /// plus 10%.
    pub value_range: Option<f64>,
}

impl Default for ChartStyle {
    fn default() -> Self {
        Self {
            width: 840,
            height: 560,
            exclusion_color: "#1f5fa8".into(),
            success_color: "#3a9a3a".into(),
            tornado_color: "#5b7fa6".into(),
            font_family: "Helvetica, Arial, sans-serif".into(),
            font_size: 12,
            decimals: 3,
            show_values: true,
            value_range: None,
        }
    }
}

impl ChartStyle {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.width < 200 || self.height < 120 {
            return Err(RenderError::Style(format!(
                "chart must be at least 200x120 px, got {}x{}",
                self.width, self.height
            )));
        }
        if self.decimals > 6 {
            return Err(RenderError::Style(format!(
                "decimals must be in 0..=6, got {}",
                self.decimals
            )));
        }
        if self.font_size == 0 {
            return Err(RenderError::Style("font size must be positive".into()));
        }
        if let Some(r) = self.value_range {
            if !(r.is_finite() && r > 0.0) {
                return Err(RenderError::Style(format!(
                    "value_range must be positive, got {r}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn value(&self, v: f64) -> String {
        fmt_fixed(v, self.decimals as usize)
    }
}

/// Fixed-point formatting without a negative sign on zero.
pub(crate) fn fmt_fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Half-range of a symmetric value axis covering `max_abs`, padded by 10%.
pub(crate) fn symmetric_scale(max_abs: f64, fixed: Option<f64>) -> f64 {
    match fixed {
        Some(r) => r,
        None if max_abs > 0.0 && max_abs.is_finite() => max_abs * 1.1,
        None => 1.0,
    }
}
