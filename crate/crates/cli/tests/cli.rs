use std::path::PathBuf;
use std::process::{Command, Output};

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use pitplot_core::{PitData, SimConfig, WhatIfReport};
use pitplot_service::{router, RouterOptions, SessionState};
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn pitplot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pitplot")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn example() -> String {
    fixture("example_portfolio.json").display().to_string()
}

#[test]
fn pit_analytic_fixture_table_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("pit.svg");
    let o = pitplot(&[
        "pit",
        "--engine",
        "analytic",
        "--metric",
        "pi",
        &example(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("PIT-plot  metric: pi  center value: 3.0650"));
    assert_eq!(out.lines().filter(|l| l.contains(" excl ")).count(), 10);
    let svg = std::fs::read_to_string(svg).unwrap();
    assert_eq!(svg.matches("class=\"pit-row\"").count(), 10);
}

#[test]
fn pit_formats() {
    let csv = stdout(&pitplot(&["pit", "--engine", "analytic", &example(), "--format", "csv"]));
    assert!(csv.starts_with("# metric: pi, center_value: 3.06496"));
    assert_eq!(csv.lines().count(), 12);
    let json: PitData =
        serde_json::from_str(&stdout(&pitplot(&["pit", "--engine", "analytic", &example(), "--format", "json"]))).unwrap();
    assert_eq!(json.rows.len(), 10);
    let svg = stdout(&pitplot(&["pit", "--engine", "analytic", &example(), "--format", "svg", "--metric", "enpv"]));
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn cost_tornado_table() {
    let o = pitplot(&["tornado", fixture("cost_tornado.json").to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(2).collect();
    assert_eq!(
        rows,
        vec![
            "1,variable_cost,840,900,960,120",
            "2,items_produced,850,900,950,100",
            "3,fixed_cost,870,900,930,60",
        ]
    );
}

#[test]
fn portfolio_tornado_from_perturbation_file() {
    let file = fixture("p4_tornado.json");
    let o = pitplot(&["tornado", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--portfolio"));

    let o = pitplot(&[
        "tornado",
        file.to_str().unwrap(),
        "--portfolio",
        &example(),
        "--engine",
        "analytic",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "enpv");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn simulate_is_deterministic_and_writes_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.csv");
    let args = ["simulate", "--seed", "42", "--iterations", "2000", &example()];
    let a = pitplot(&args);
    let b = pitplot(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let o = pitplot(&[
        "simulate",
        "--iterations",
        "3",
        &example(),
        "--ledger",
        ledger.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["engine"], "monte_carlo");
    let text = std::fs::read_to_string(&ledger).unwrap();
    // 10 projects x 3 iterations x 20 years, plus header
    assert_eq!(text.lines().count(), 10 * 3 * 20 + 1);

    let o = pitplot(&["simulate", "--engine", "analytic", &example(), "--ledger", ledger.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let cfg = fixture("config_discounted.json");
    let file_only: PitData = serde_json::from_str(&stdout(&pitplot(&[
        "pit", &example(), "--config", cfg.to_str().unwrap(), "--engine", "analytic", "--format", "json",
    ])))
    .unwrap();
    let overridden: PitData = serde_json::from_str(&stdout(&pitplot(&[
        "pit", &example(), "--config", cfg.to_str().unwrap(), "--engine", "analytic", "--discount-rate", "0", "--format", "json",
    ])))
    .unwrap();
    let defaults: PitData =
        serde_json::from_str(&stdout(&pitplot(&["pit", &example(), "--engine", "analytic", "--format", "json"]))).unwrap();
    assert_ne!(file_only.center_value, defaults.center_value);
    assert_eq!(overridden, defaults);
}

#[test]
fn whatif_emits_baseline_scenario_and_change() {
    let o = pitplot(&["whatif", &example(), "--engine", "analytic", "--exclude", "P1", "--exclude", "P5", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: WhatIfReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.baseline.rows.len(), 10);
    assert_eq!(r.scenario.rows.len(), 8);
    assert_eq!(r.comparison.len(), 10);

    let file = fixture("whatif_terminate_p1_p5.json");
    let o2 = pitplot(&["whatif", &example(), "--engine", "analytic", "--whatif", file.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.stdout, o2.stdout);

    let o = pitplot(&["whatif", &example(), "--engine", "analytic", "--force-success", "P9", "--set", "P4:Ph3.pos=0.8", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: WhatIfReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.scenario.row("P9").unwrap().delta_success, Some(0.0));
}

#[test]
fn error_paths_name_the_problem_and_set_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let o = pitplot(&["pit", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("missing.json"));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    let o = pitplot(&["validate", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("broken.json"));

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(fixture("example_portfolio.json")).unwrap()).unwrap();
    v["projects"][3]["phases"][0]["pos"] = json!(1.2);
    let invalid = dir.path().join("invalid.json");
    std::fs::write(&invalid, v.to_string()).unwrap();
    let o = pitplot(&["validate", invalid.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("invalid.json") && err.contains("P4") && err.contains("Ph3.pos"), "{err}");

    let o = pitplot(&["whatif", &example(), "--set", "P4:Ph3.pos=1.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Ph3.pos"));
    let o = pitplot(&["whatif", &example(), "--set", "P4-Ph3.pos"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pitplot(&["whatif", &example(), "--exclude", "P42"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("P42"));

    let free = dir.path().join("free.json");
    std::fs::write(
        &free,
        json!({"name": "free", "projects": [
            {"id": "A", "peak_sales": 10, "phases": [{"phase": "Reg", "duration": 1, "cost": 0, "pos": 0.5}]},
            {"id": "B", "peak_sales": 10, "phases": [{"phase": "Reg", "duration": 1, "cost": 0, "pos": 0.5}]}
        ]})
        .to_string(),
    )
    .unwrap();
    let o = pitplot(&["pit", free.to_str().unwrap(), "--engine", "analytic"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("PI undefined for zero cost"));

    let o = pitplot(&["pit", &example(), "--iterations", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config.iterations"));

    let o = pitplot(&["pit", &example(), "--metric", "irr"]);
    assert_eq!(o.status.code(), Some(2));
}

async fn service_post(state: &SessionState, uri: &str, body: Value) -> Value {
    let app = router(state.clone(), &RouterOptions::default());
    let req = Request::builder()
        .method("POST")
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert!(resp.status().is_success());
    serde_json::from_slice(&resp.into_body().collect().await.unwrap().to_bytes()).unwrap()
}

#[tokio::test]
async fn cli_and_service_agree() {
    for (engine, cfg) in [
        ("analytic", SimConfig::analytic()),
        ("monte_carlo", SimConfig { iterations: 5000, ..SimConfig::default() }),
    ] {
        let state = SessionState::new(Some(pitplot_core::fixtures::example_portfolio()), cfg);
        let served: PitData = serde_json::from_value(service_post(&state, "/api/pit", json!({"metric": "pi"})).await).unwrap();
        let o = pitplot(&["pit", &example(), "--engine", engine, "--iterations", "5000", "--format", "json"]);
        let cli: PitData = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(served, cli, "{engine}");

        let served: WhatIfReport = serde_json::from_value(
            service_post(&state, "/api/whatif", json!({"exclusions": ["P1", "P5"], "metric": "pi"})).await,
        )
        .unwrap();
        let o = pitplot(&[
            "whatif", &example(), "--engine", engine, "--iterations", "5000", "--exclude", "P1", "--exclude", "P5", "--format", "json",
        ]);
        let cli: WhatIfReport = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(served, cli, "{engine}");
    }
}
