use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use pitplot_core::fixtures::EXAMPLE_PORTFOLIO;
use pitplot_core::{run_pit, MetricKind, PitData, SimConfig};
use pitplot_service::{router, RouterOptions, SessionState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(state: &SessionState) -> Router {
    router(state.clone(), &RouterOptions::default())
}

fn loaded_state() -> SessionState {
    SessionState::new(Some(pitplot_core::fixtures::example_portfolio()), SimConfig::analytic())
}

async fn call(app: Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(v) => Body::from(v.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, value)
}

#[tokio::test]
async fn health_reports_version() {
    let (status, body) = call(app(&loaded_state()), "GET", "/api/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert_eq!(body["version"], env!("CARGO_PKG_VERSION"));
}

#[tokio::test]
async fn put_portfolio_then_pit_matches_library() {
    let state = SessionState::new(None, SimConfig::analytic());
    let (status, _) = call(app(&state), "POST", "/api/pit", Some(json!({"metric": "pi"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let fixture: Value = serde_json::from_str(EXAMPLE_PORTFOLIO).unwrap();
    let (status, body) = call(app(&state), "PUT", "/api/portfolio", Some(fixture)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["projects"].as_array().unwrap().len(), 10);

    let (status, body) = call(app(&state), "POST", "/api/pit", Some(json!({"metric": "pi"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["engine"], "analytic");
    assert_eq!(body["seed"], 42);
    assert_eq!(body["config"]["market_years"], 10);
    let served: PitData = serde_json::from_value(body).unwrap();
    let direct = run_pit(&pitplot_core::fixtures::example_portfolio(), &SimConfig::analytic(), &MetricKind::Pi).unwrap();
    assert_eq!(served, direct);
}

#[tokio::test]
async fn identical_requests_give_identical_responses() {
    let state = SessionState::new(Some(pitplot_core::fixtures::example_portfolio()), SimConfig {
        iterations: 20_000,
        ..SimConfig::default()
    });
    let a = call(app(&state), "POST", "/api/pit", Some(json!({"metric": "enpv"}))).await;
    assert_eq!(state.cache_len(), 1);
    let b = call(app(&state), "POST", "/api/pit", Some(json!({"metric": "enpv"}))).await;
    assert_eq!(a, b);
    assert_eq!(a.1["engine"], "monte_carlo");
    // A fresh session computes the same thing without the cache.
    let fresh = SessionState::new(Some(pitplot_core::fixtures::example_portfolio()), state.snapshot().config.clone());
    let c = call(app(&fresh), "POST", "/api/pit", Some(json!({"metric": "enpv"}))).await;
    assert_eq!(a, c);
}

#[tokio::test]
async fn put_config_invalidates_cache() {
    let state = loaded_state();
    let (_, before) = call(app(&state), "POST", "/api/pit", None).await;
    assert_eq!(before["metric_name"], "pi");
    assert_eq!(state.cache_len(), 1);

    let (status, cfg) = call(
        app(&state),
        "PUT",
        "/api/config",
        Some(json!({"engine": "analytic", "discount_rate": 0.1})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(cfg["discount_rate"], 0.1);
    assert_eq!(state.cache_len(), 0);

    let (_, after) = call(app(&state), "POST", "/api/pit", None).await;
    assert_ne!(before["center_value"], after["center_value"]);
    assert_eq!(after["config"]["discount_rate"], 0.1);
}

#[tokio::test]
async fn invalid_portfolio_is_400_with_diagnostics() {
    let state = loaded_state();
    let mut fixture: Value = serde_json::from_str(EXAMPLE_PORTFOLIO).unwrap();
    fixture["projects"][3]["phases"][0]["pos"] = json!(1.2);
    let (status, body) = call(app(&state), "PUT", "/api/portfolio", Some(fixture)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["error"], "validation");
    let d = &body["diagnostics"][0];
    assert_eq!(d["project_id"], "P4");
    assert_eq!(d["field"], "Ph3.pos");
    // The stored portfolio is unchanged.
    let (_, stored) = call(app(&state), "GET", "/api/portfolio", None).await;
    assert_eq!(stored["projects"][3]["phases"][0]["pos"], 0.7);

    let (status, _) = call(app(&state), "PUT", "/api/config", Some(json!({"iterations": 0}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, body) = call(app(&state), "POST", "/api/pit", Some(json!({"metric": "irr"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
}

#[tokio::test]
async fn whatif_returns_baseline_and_scenario_without_mutating() {
    let state = loaded_state();
    let (status, body) = call(
        app(&state),
        "POST",
        "/api/whatif",
        Some(json!({"exclusions": ["P1", "P5"], "metric": "pi"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["baseline"]["rows"].as_array().unwrap().len(), 10);
    assert_eq!(body["scenario"]["rows"].as_array().unwrap().len(), 8);
    assert_eq!(body["engine"], "analytic");

    let (status, body) = call(
        app(&state),
        "POST",
        "/api/whatif",
        Some(json!({"forced_success": ["P9"]})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let p9 = body["scenario"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["project_id"] == "P9")
        .unwrap();
    assert_eq!(p9["delta_success"], 0.0);

    let (_, stored) = call(app(&state), "GET", "/api/portfolio", None).await;
    assert_eq!(stored["projects"].as_array().unwrap().len(), 10);
}

#[tokio::test]
async fn whatif_error_statuses() {
    let state = loaded_state();
    let all_but_one: Vec<String> = (2..=10).map(|i| format!("P{i}")).collect();
    let (status, body) = call(
        app(&state),
        "POST",
        "/api/whatif",
        Some(json!({"exclusions": all_but_one, "metric": "pi"})),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");

    let (status, _) = call(app(&state), "POST", "/api/whatif", Some(json!({"exclusions": ["P42"]}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, body) = call(
        app(&state),
        "POST",
        "/api/whatif",
        Some(json!({"overrides": [{"project_id": "P4", "field": "Ph3.pos", "value": 1.2}]})),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
}

#[tokio::test]
async fn zero_cost_pi_is_422() {
    let free = json!({"name": "free", "projects": [
        {"id": "A", "peak_sales": 10, "phases": [{"phase": "Reg", "duration": 1, "cost": 0, "pos": 0.5}]},
        {"id": "B", "peak_sales": 10, "phases": [{"phase": "Reg", "duration": 1, "cost": 0, "pos": 0.5}]}
    ]});
    let state = loaded_state();
    let (status, _) = call(app(&state), "PUT", "/api/portfolio", Some(free)).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = call(app(&state), "POST", "/api/pit", Some(json!({"metric": "pi"}))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(body["message"].as_str().unwrap().contains("zero cost"));
}

#[tokio::test]
async fn tornado_endpoint() {
    let state = loaded_state();
    let body = json!({"metric": "enpv", "perturbations": [
        {"project_id": "P4", "field": "Ph3.pos", "low": 0.63, "high": 0.77}
    ]});
    let (status, resp) = call(app(&state), "POST", "/api/tornado", Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(resp["outcome"], "enpv");
    let row = &resp["rows"][0];
    let span = row["span"].as_f64().unwrap();
    assert!((span - 2.0 * 0.07 * (0.95 * 4000.0 - 40.0)).abs() < 1e-6);

    let missing = json!({"perturbations": [{"project_id": "P99", "field": "peak_sales", "low": 1, "high": 2}]});
    let (status, _) = call(app(&state), "POST", "/api/tornado", Some(missing)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(app(&state), "POST", "/api/tornado", Some(json!({"metric": "pi"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn state_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    let state = SessionState::load_or_default(&path, SimConfig::analytic()).unwrap();
    assert!(state.snapshot().portfolio.is_none());
    let fixture: Value = serde_json::from_str(EXAMPLE_PORTFOLIO).unwrap();
    let (status, _) = call(app(&state), "PUT", "/api/portfolio", Some(fixture)).await;
    assert_eq!(status, StatusCode::OK);
    assert!(path.exists());

    let reloaded = SessionState::load_or_default(&path, SimConfig::default()).unwrap();
    let snap = reloaded.snapshot();
    assert_eq!(snap.portfolio.as_ref().unwrap().len(), 10);
    assert_eq!(snap.config, SimConfig::analytic());
}

#[tokio::test]
async fn static_dir_and_cors() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>ui</h1>").unwrap();
    let options = RouterOptions {
        static_dir: Some(dir.path().to_path_buf()),
        permissive_cors: true,
    };
    let app = router(loaded_state(), &options);
    let req = Request::builder()
        .uri("/index.html")
        .header("origin", "http://localhost:5173")
        .body(Body::empty())
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert!(resp.headers().contains_key("access-control-allow-origin"));
    let (status, _) = call(app, "GET", "/api/health", None).await;
    assert_eq!(status, StatusCode::OK);
}
