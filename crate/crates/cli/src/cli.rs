use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pitplot_core::{EngineKind, MetricKind, Sampling};

#[derive(Debug, Parser)]
#[command(name = "pitplot", version, about = "Project Impact Tornado plots for R&D portfolios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a portfolio (and optionally a config) and report every problem.
    Validate {
        portfolio: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Simulate cash flows and summarize per-project expectations.
    Simulate(SimulateArgs),
    /// Compute PIT-plot data for a portfolio.
    Pit(PitArgs),
    /// One-at-a-time tornado analysis.
    Tornado(TornadoArgs),
    /// Compare the portfolio's PIT-plot with a modified scenario.
    Whatif(WhatIfArgs),
    /// Serve the HTTP API (and optionally a UI build).
    Serve(ServeArgs),
}

/// Simulation settings. Flags override the config file, which overrides
/// built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Simulation config file (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub engine: Option<EngineKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub discount_rate: Option<f64>,
    #[arg(long)]
    pub market_years: Option<u32>,
    #[arg(long)]
    pub ramp_years: Option<u32>,
    #[arg(long)]
    pub sampling: Option<Sampling>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutArgs {
    /// Write the main output here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChartFormat {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub portfolio: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
    #[command(flatten)]
    pub out: OutArgs,
    /// Also write the per-iteration cash-flow ledger as CSV.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PitArgs {
    pub portfolio: PathBuf,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = MetricKind::Pi)]
    pub metric: MetricKind,
    #[arg(long, value_enum, default_value_t = ChartFormat::Text)]
    pub format: ChartFormat,
    #[command(flatten)]
    pub out: OutArgs,
    /// Also write the SVG chart to this path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Chart style file (JSON).
    #[arg(long)]
    pub style: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TornadoArgs {
    /// A scenario file (expression + variables), or a perturbation file
    /// together with --portfolio.
    pub file: PathBuf,
    #[arg(long)]
    pub portfolio: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Overrides the metric named in a perturbation file.
    #[arg(long)]
    pub metric: Option<MetricKind>,
    #[arg(long, value_enum, default_value_t = ChartFormat::Text)]
    pub format: ChartFormat,
    #[command(flatten)]
    pub out: OutArgs,
    #[arg(long)]
    pub style: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WhatIfArgs {
    pub portfolio: PathBuf,
    /// What-if file (JSON); the flags below add to it.
    #[arg(long = "whatif")]
    pub whatif_file: Option<PathBuf>,
    #[arg(long = "exclude", value_name = "ID")]
    pub exclude: Vec<String>,
    #[arg(long = "force-success", value_name = "ID")]
    pub force_success: Vec<String>,
    /// Field override, e.g. `P4:Ph3.pos=0.8`.
    #[arg(long = "set", value_name = "ID:FIELD=VALUE")]
    pub set: Vec<String>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = MetricKind::Pi)]
    pub metric: MetricKind,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
    /// Portfolio to load at start.
    #[arg(long)]
    pub portfolio: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Load the session from this file at start and save it on changes and
    /// at shutdown.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Directory with a UI build to serve at `/`.
    #[arg(long)]
    pub static_dir: Option<PathBuf>,
    /// Allow cross-origin requests from any origin.
    #[arg(long)]
    pub cors: bool,
}
