use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use pitplot_core::export::{pit_to_csv, pit_to_json, tornado_to_csv};
use pitplot_core::metrics::{enpv, productivity_index, project_totals};
use pitplot_core::render::{render_pit, render_text, render_tornado, render_tornado_text};
use pitplot_core::tornado::ExpressionScenario;
use pitplot_core::whatif::FieldOverride;
use pitplot_core::{
    analytic_expectation, load_config, load_portfolio, run_pit, run_whatif, simulate_portfolio,
    ChartStyle, EngineKind, Error, PerturbationSet, SimConfig, Totals, TornadoReport, TornadoRow,
    ValidatedPortfolio, WhatIf, WhatIfReport,
};
use serde::Serialize;

use crate::cli::{
    ChartFormat, Cli, Command, ConfigArgs, OutArgs, PitArgs, ServeArgs, SimulateArgs, TableFormat,
    TornadoArgs, WhatIfArgs,
};
use crate::Failure;

type Result<T> = std::result::Result<T, Failure>;

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate { portfolio, config } => validate(&portfolio, config.as_deref()),
        Command::Simulate(a) => simulate(a),
        Command::Pit(a) => pit(a),
        Command::Tornado(a) => tornado(a),
        Command::Whatif(a) => whatif(a),
        Command::Serve(a) => serve(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
        .into()
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn emit(out: &OutArgs, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => write_file(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(format!("stdout: {e}"))),
    }
}

fn portfolio(path: &Path) -> Result<ValidatedPortfolio> {
    let name = path.display().to_string();
    load_portfolio(&read(path)?, &name).map_err(|e| in_file(e, &name))
}

fn config_file(path: &Path) -> Result<SimConfig> {
    let name = path.display().to_string();
    load_config(&read(path)?, &name).map_err(|e| in_file(e, &name))
}

/// Parse errors already name their source; validation errors do not.
fn in_file(e: Error, name: &str) -> Failure {
    let named = matches!(e, Error::Parse { .. });
    let f = Failure::from(e);
    if named {
        f
    } else {
        f.context(name)
    }
}

fn style(path: Option<&Path>) -> Result<ChartStyle> {
    match path {
        None => Ok(ChartStyle::default()),
        Some(p) => serde_json::from_str(&read(p)?)
            .map_err(|e| Failure::validation(format!("{}: {e}", p.display()))),
    }
}

impl ConfigArgs {
    /// `base`, then the config file, then individual flags.
    fn resolve_onto(&self, base: SimConfig) -> Result<SimConfig> {
        let mut c = match &self.config {
            Some(path) => config_file(path)?,
            None => base,
        };
        if let Some(v) = self.engine {
            c.engine = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.iterations {
            c.iterations = v;
        }
        if let Some(v) = self.discount_rate {
            c.discount_rate = v;
        }
        if let Some(v) = self.market_years {
            c.market_years = v;
        }
        if let Some(v) = self.ramp_years {
            c.ramp_years = v;
        }
        if let Some(v) = self.sampling {
            c.sampling = v;
        }
        c.validate().map_err(Error::from)?;
        Ok(c)
    }

    fn resolve(&self) -> Result<SimConfig> {
        self.resolve_onto(SimConfig::default())
    }

    fn is_set(&self) -> bool {
        self.config.is_some()
            || self.engine.is_some()
            || self.seed.is_some()
            || self.iterations.is_some()
            || self.discount_rate.is_some()
            || self.market_years.is_some()
            || self.ramp_years.is_some()
            || self.sampling.is_some()
    }
}

fn validate(path: &Path, config: Option<&Path>) -> Result<()> {
    if let Some(c) = config {
        config_file(c)?;
    }
    let p = portfolio(path)?;
    println!("{}: valid, {} projects", path.display(), p.len());
    Ok(())
}

#[derive(Debug, Serialize)]
struct ProjectSummary {
    project_id: String,
    success_fraction: Option<f64>,
    mean_revenue: f64,
    mean_cost: f64,
    enpv: f64,
    pi: Option<f64>,
}

impl ProjectSummary {
    fn new(totals: &Totals, id: &str, success_fraction: Option<f64>) -> Self {
        Self {
            project_id: id.to_string(),
            success_fraction,
            mean_revenue: totals.revenue,
            mean_cost: totals.cost,
            enpv: enpv(totals),
            pi: productivity_index(totals).ok(),
        }
    }
}

#[derive(Debug, Serialize)]
struct SimulationSummary {
    engine: EngineKind,
    seed: u64,
    config: SimConfig,
    projects: Vec<ProjectSummary>,
    portfolio: ProjectSummary,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

impl SimulationSummary {
    fn to_text(&self) -> String {
        let mut s = format!(
            "engine: {}  seed: {}  iterations: {}  discount_rate: {}  market_years: {}\n",
            self.engine, self.seed, self.config.iterations, self.config.discount_rate, self.config.market_years
        );
        let _ = writeln!(
            s,
            "{:<10} {:>10} {:>14} {:>14} {:>14} {:>10}",
            "project", "success", "revenue", "cost", "enpv", "pi"
        );
        for p in self.projects.iter().chain([&self.portfolio]) {
            let _ = writeln!(
                s,
                "{:<10} {:>10} {:>14.4} {:>14.4} {:>14.4} {:>10}",
                p.project_id,
                fmt_opt(p.success_fraction),
                p.mean_revenue,
                p.mean_cost,
                p.enpv,
                fmt_opt(p.pi)
            );
        }
        s
    }

    fn to_csv(&self) -> String {
        let mut s = String::from("project_id,success_fraction,mean_revenue,mean_cost,enpv,pi\n");
        for p in self.projects.iter().chain([&self.portfolio]) {
            let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                p.project_id,
                opt(p.success_fraction),
                p.mean_revenue,
                p.mean_cost,
                p.enpv,
                opt(p.pi)
            );
        }
        s
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let p = portfolio(&a.portfolio)?;
    let config = a.config.resolve()?;
    let projects: Vec<ProjectSummary> = match config.engine {
        EngineKind::MonteCarlo => {
            let sets = simulate_portfolio(&p, &config);
            if let Some(path) = &a.ledger {
                let file = fs::File::create(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
                pitplot_core::engine::write_ledger(&sets, std::io::BufWriter::new(file))
                    .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
            }
            sets.iter()
                .map(|cf| ProjectSummary::new(&project_totals(cf), cf.project_id(), Some(cf.success_fraction())))
                .collect()
        }
        EngineKind::Analytic => {
            if a.ledger.is_some() {
                return Err(Failure::validation("--ledger needs the monte_carlo engine"));
            }
            p.projects()
                .iter()
                .map(|proj| {
                    let e = analytic_expectation(proj, &config);
                    ProjectSummary::new(&Totals::from(&e), &proj.id, Some(e.success_prob))
                })
                .collect()
        }
    };
    let totals = projects.iter().fold(Totals::project("portfolio", 0.0, 0.0), |t, s| {
        Totals::project("portfolio", t.revenue + s.mean_revenue, t.cost + s.mean_cost)
    });
    let summary = SimulationSummary {
        engine: config.engine,
        seed: config.seed,
        portfolio: ProjectSummary::new(&totals, "portfolio", None),
        config,
        projects,
    };
    let text = match a.format {
        TableFormat::Text => summary.to_text(),
        TableFormat::Csv => summary.to_csv(),
        TableFormat::Json => to_json(&summary),
    };
    emit(&a.out, &text)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

fn pit(a: PitArgs) -> Result<()> {
    let p = portfolio(&a.portfolio)?;
    let config = a.config.resolve()?;
    let style = style(a.style.as_deref())?;
    let data = run_pit(&p, &config, &a.metric)?;
    let svg = || render_pit(&data, &style).map_err(Error::from);
    let text = match a.format {
        ChartFormat::Text => render_text(&data),
        ChartFormat::Csv => pit_to_csv(&data),
        ChartFormat::Json => pit_to_json(&data) + "\n",
        ChartFormat::Svg => svg()?,
    };
    if let Some(path) = &a.svg {
        write_file(path, &svg()?)?;
    }
    emit(&a.out, &text)
}

fn tornado_output(format: ChartFormat, report: &TornadoReport, style: &ChartStyle) -> Result<String> {
    Ok(match format {
        ChartFormat::Text => render_tornado_text(&report.rows, &report.outcome),
        ChartFormat::Csv => tornado_to_csv(&report.outcome, &report.rows),
        ChartFormat::Json => report.to_json() + "\n",
        ChartFormat::Svg => render_tornado(&report.rows, &report.outcome, style).map_err(Error::from)?,
    })
}

fn tornado(a: TornadoArgs) -> Result<()> {
    let text = read(&a.file)?;
    let name = a.file.display().to_string();
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failure::validation(format!("{name}: {e}")))?;
    let style = style(a.style.as_deref())?;
    let rows: Vec<TornadoRow>;
    let outcome: String;
    if value.get("expression").is_some() {
        if a.portfolio.is_some() || a.metric.is_some() || a.config.is_set() {
            return Err(Failure::validation(format!(
                "{name} is a self-contained scenario; --portfolio, --metric and simulation flags do not apply"
            )));
        }
        let scenario = ExpressionScenario::from_json(&text).map_err(|e| Failure::validation(format!("{name}: {e}")))?;
        rows = scenario.run().map_err(|e| Failure::from(Error::from(e)).context(&name))?;
        outcome = scenario.outcome.clone();
    } else {
        let Some(pf) = &a.portfolio else {
            return Err(Failure::validation(format!("{name} is a perturbation file; pass --portfolio")));
        };
        let mut set = PerturbationSet::from_json(&text).map_err(|e| Failure::validation(format!("{name}: {e}")))?;
        if let Some(m) = a.metric {
            set.metric = m;
        }
        let p = portfolio(pf)?;
        let config = a.config.resolve()?;
        rows = set.run(&p, &config).map_err(|e| Failure::from(Error::from(e)).context(&name))?;
        outcome = set.metric.to_string();
    }
    let report = TornadoReport::new(outcome, rows);
    emit(&a.out, &tornado_output(a.format, &report, &style)?)
}

impl Failure {
    fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

fn parse_override(s: &str) -> Result<FieldOverride> {
    let bad = || Failure::validation(format!("--set '{s}': expected ID:FIELD=VALUE, e.g. P4:Ph3.pos=0.8"));
    let (id, rest) = s.split_once(':').ok_or_else(bad)?;
    let (field, value) = rest.split_once('=').ok_or_else(bad)?;
    let field = field
        .parse()
        .map_err(|e| Failure::validation(format!("--set '{s}': {e}")))?;
    let value = value
        .trim()
        .parse()
        .map_err(|_| Failure::validation(format!("--set '{s}': '{value}' is not a number")))?;
    Ok(FieldOverride {
        project_id: id.trim().to_string(),
        field,
        value,
    })
}

fn whatif_text(r: &WhatIfReport) -> String {
    let mut s = String::from("== baseline ==\n");
    s.push_str(&render_text(&r.baseline));
    s.push_str("\n== scenario ==\n");
    s.push_str(&render_text(&r.scenario));
    let _ = writeln!(s, "\n== change ==  center value {:+.4}", r.center_change);
    let _ = writeln!(
        s,
        "{:<10} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "project", "excl base", "excl new", "excl chg", "succ base", "succ new", "succ chg"
    );
    for c in &r.comparison {
        let _ = writeln!(
            s,
            "{:<10} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            c.project_id,
            fmt_opt(c.baseline_exclusion),
            fmt_opt(c.scenario_exclusion),
            fmt_opt(c.change_exclusion),
            fmt_opt(c.baseline_success),
            fmt_opt(c.scenario_success),
            fmt_opt(c.change_success),
        );
    }
    s
}

fn whatif(a: WhatIfArgs) -> Result<()> {
    let p = portfolio(&a.portfolio)?;
    let mut w = match &a.whatif_file {
        Some(path) => serde_json::from_str::<WhatIf>(&read(path)?)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?,
        None => WhatIf::default(),
    };
    w.exclusions.extend(a.exclude.iter().cloned());
    w.forced_success.extend(a.force_success.iter().cloned());
    for s in &a.set {
        w.overrides.push(parse_override(s)?);
    }
    let config = a.config.resolve()?;
    let report = run_whatif(&p, &config, &w, &a.metric)?;
    let text = match a.format {
        TableFormat::Text => whatif_text(&report),
        TableFormat::Csv => report.to_csv(),
        TableFormat::Json => report.to_json() + "\n",
    };
    emit(&a.out, &text)
}

fn serve(a: ServeArgs) -> Result<()> {
    use pitplot_service::{RouterOptions, SessionState};

    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let state = match &a.state_file {
        Some(path) => SessionState::load_or_default(path, SimConfig::default())
            .map_err(|e| Failure::validation(format!("{e:#}")))?,
        None => SessionState::new(None, SimConfig::default()),
    };
    let portfolio = a.portfolio.as_deref().map(portfolio).transpose()?;
    let config = if a.config.is_set() {
        Some(a.config.resolve_onto(state.snapshot().config.clone())?)
    } else {
        None
    };
    if portfolio.is_some() || config.is_some() {
        state.update(portfolio, config);
    }
    let options = RouterOptions {
        static_dir: a.static_dir.clone(),
        permissive_cors: a.cors,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::io(format!("runtime: {e}")))?;
    runtime
        .block_on(pitplot_service::serve(a.bind, state, options))
        .map_err(|e| Failure::io(format!("{e:#}")))
}

