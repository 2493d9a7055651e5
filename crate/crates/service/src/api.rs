use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use pitplot_core::{
    run_pit, run_whatif, EngineKind, MetricKind, PerturbationSet, PitData, PortfolioSpec,
    SimConfig, TornadoReport, ValidatedPortfolio, WhatIf, WhatIfReport,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::state::{SessionState, Snapshot};

/// Result payload plus what produced it.
#[derive(Debug, Serialize, Deserialize)]
pub struct Echoed<T> {
    #[serde(flatten)]
    pub result: T,
    pub engine: EngineKind,
    pub seed: u64,
    pub config: SimConfig,
}

impl<T> Echoed<T> {
    fn new(result: T, config: &SimConfig) -> Self {
        Self {
            result,
            engine: config.engine,
            seed: config.seed,
            config: config.clone(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct PitRequest {
    metric: MetricKind,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
struct WhatIfRequest {
    #[serde(flatten)]
    whatif: WhatIf,
    metric: MetricKind,
}

#[derive(Debug, Serialize)]
struct Health {
    status: &'static str,
    version: &'static str,
}

/// Parses a JSON body; an empty body means "all defaults".
fn parse_body<T: DeserializeOwned + Default>(body: &Bytes) -> Result<T, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("request body: {e}")))
}

fn parse_required<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("request body: {e}")))
}

fn loaded(snap: &Snapshot) -> Result<ValidatedPortfolio, ApiError> {
    snap.portfolio
        .clone()
        .ok_or_else(|| ApiError::not_found("no portfolio loaded; PUT /api/portfolio first"))
}

async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ApiError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(format!("computation failed: {e}")))?
}

/// Baseline PIT data for the snapshot, from cache when possible.
async fn baseline(state: &SessionState, snap: Arc<Snapshot>, metric: MetricKind) -> Result<PitData, ApiError> {
    let key = snap.cache_key(metric);
    if let Some(hit) = state.cached(&key) {
        return Ok(hit);
    }
    let portfolio = loaded(&snap)?;
    let config = snap.config.clone();
    let data = blocking(move || Ok(run_pit(&portfolio, &config, &metric)?)).await?;
    state.store(key, data.clone());
    Ok(data)
}

async fn health() -> Json<Health> {
    Json(Health {
        status: "ok",
        version: env!("CARGO_PKG_VERSION"),
    })
}

async fn get_portfolio(State(state): State<SessionState>) -> Result<Json<PortfolioSpec>, ApiError> {
    let snap = state.snapshot();
    Ok(Json(loaded(&snap)?.into_inner()))
}

async fn put_portfolio(State(state): State<SessionState>, body: Bytes) -> Result<Json<PortfolioSpec>, ApiError> {
    let spec: PortfolioSpec = parse_required(&body)?;
    let portfolio = pitplot_core::validate_portfolio(spec)?;
    let snap = state.update(Some(portfolio), None);
    persist(&state);
    Ok(Json(loaded(&snap)?.into_inner()))
}

async fn put_config(State(state): State<SessionState>, body: Bytes) -> Result<Json<SimConfig>, ApiError> {
    let config: SimConfig = parse_body(&body)?;
    config.validate()?;
    let snap = state.update(None, Some(config));
    persist(&state);
    Ok(Json(snap.config.clone()))
}

fn persist(state: &SessionState) {
    if let Err(e) = state.save() {
        tracing::warn!("could not save state: {e:#}");
    }
}

async fn post_pit(State(state): State<SessionState>, body: Bytes) -> Result<Json<Echoed<PitData>>, ApiError> {
    let req: PitRequest = parse_body(&body)?;
    let snap = state.snapshot();
    let data = baseline(&state, snap.clone(), req.metric).await?;
    Ok(Json(Echoed::new(data, &snap.config)))
}

async fn post_whatif(State(state): State<SessionState>, body: Bytes) -> Result<Json<Echoed<WhatIfReport>>, ApiError> {
    let req: WhatIfRequest = parse_body(&body)?;
    let snap = state.snapshot();
    let portfolio = loaded(&snap)?;
    let config = snap.config.clone();
    let metric = req.metric;
    let report = blocking(move || Ok(run_whatif(&portfolio, &config, &req.whatif, &metric)?)).await?;
    Ok(Json(Echoed::new(report, &snap.config)))
}

async fn post_tornado(State(state): State<SessionState>, body: Bytes) -> Result<Json<Echoed<TornadoReport>>, ApiError> {
    let req: PerturbationSet = parse_required(&body)?;
    let snap = state.snapshot();
    let portfolio = loaded(&snap)?;
    let config = snap.config.clone();
    let rows = blocking(move || {
        req.run(&portfolio, &config)
            .map(|rows| TornadoReport::new(req.metric.as_str(), rows))
            .map_err(|e| pitplot_core::Error::from(e).into())
    })
    .await?;
    Ok(Json(Echoed::new(rows, &snap.config)))
}

pub fn routes() -> Router<SessionState> {
    Router::new()
        .route("/health", get(health))
        .route("/portfolio", get(get_portfolio).put(put_portfolio))
        .route("/config", put(put_config).get(get_config))
        .route("/pit", post(post_pit))
        .route("/whatif", post(post_whatif))
        .route("/tornado", post(post_tornado))
}

async fn get_config(State(state): State<SessionState>) -> Json<SimConfig> {
    Json(state.snapshot().config.clone())
}
