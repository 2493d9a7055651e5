use pitplot_core::export::{pit_to_csv, tornado_to_csv};
use pitplot_core::fixtures::{cost_tornado, example_portfolio};
use pitplot_core::render::{render_pit, render_text, render_tornado, render_tornado_text};
use pitplot_core::{run_pit, ChartStyle, MetricKind, PitData, SimConfig};

fn fixture_pit() -> PitData {
    run_pit(&example_portfolio(), &SimConfig::analytic(), &MetricKind::Pi).unwrap()
}

/// (x, width) of every drawn bar of the given kind, in document order.
fn bars(svg: &str, kind: &str) -> Vec<(f64, f64)> {
    let tag = format!("<rect class=\"bar {kind}\"");
    svg.match_indices(&tag)
        .map(|(i, _)| {
            let rest = &svg[i..];
            let attr = |name: &str| -> f64 {
                let key = format!(" {name}=\"");
                let start = rest.find(&key).unwrap() + key.len();
                let end = start + rest[start..].find('"').unwrap();
                rest[start..end].parse().unwrap()
            };
            (attr("x"), attr("width"))
        })
        .collect()
}

#[test]
fn pit_svg_has_two_bars_per_project() {
    let svg = render_pit(&fixture_pit(), &ChartStyle::default()).unwrap();
    assert_eq!(svg.matches("<g class=\"pit-row\"").count(), 10);
    assert_eq!(bars(&svg, "exclusion").len(), 10);
    assert_eq!(bars(&svg, "success").len(), 10);
    assert!(svg.contains("center-line"));
    insta::assert_snapshot!("pit_fixture_svg", svg);
}

#[test]
fn pit_rows_follow_data_order() {
    let data = fixture_pit();
    let svg = render_pit(&data, &ChartStyle::default()).unwrap();
    let positions: Vec<usize> = data
        .order()
        .iter()
        .map(|id| svg.find(&format!("data-project=\"{id}\"")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn tornado_svg_widest_bar_first() {
    let rows = cost_tornado().run().unwrap();
    let svg = render_tornado(&rows, "total_cost", &ChartStyle::default()).unwrap();
    let b = bars(&svg, "tornado");
    assert_eq!(b.len(), 3);
    assert!(b[0].1 > b[1].1 && b[1].1 > b[2].1);
    assert!(svg.find("data-variable=\"variable_cost\"").unwrap() < svg.find("data-variable=\"fixed_cost\"").unwrap());
    insta::assert_snapshot!("cost_tornado_svg", svg);
}

#[test]
fn text_charts() {
    let text = render_text(&fixture_pit());
    insta::assert_snapshot!("pit_fixture_text", text);
    let rows = cost_tornado().run().unwrap();
    insta::assert_snapshot!("cost_tornado_text", render_tornado_text(&rows, "total_cost"));
}

#[test]
fn csv_exports() {
    insta::assert_snapshot!("pit_fixture_csv", pit_to_csv(&fixture_pit()));
    let rows = cost_tornado().run().unwrap();
    insta::assert_snapshot!("cost_tornado_csv", tornado_to_csv("total_cost", &rows));
}

#[test]
fn output_is_byte_stable() {
    let style = ChartStyle::default();
    let a = render_pit(&fixture_pit(), &style).unwrap();
    let b = render_pit(&fixture_pit(), &style).unwrap();
    assert_eq!(a, b);
    assert_eq!(render_text(&fixture_pit()), render_text(&fixture_pit()));
}

#[test]
fn doubling_deltas_doubles_bar_lengths_on_a_fixed_axis() {
    let data = fixture_pit();
    let mut doubled = data.clone();
    for r in &mut doubled.rows {
        r.delta_exclusion = r.delta_exclusion.map(|v| 2.0 * v);
        r.delta_success = r.delta_success.map(|v| 2.0 * v);
    }
    let style = ChartStyle {
        value_range: Some(3.0),
        ..ChartStyle::default()
    };
    let a = render_pit(&data, &style).unwrap();
    let b = render_pit(&doubled, &style).unwrap();
    for kind in ["exclusion", "success"] {
        for (x, y) in bars(&a, kind).iter().zip(bars(&b, kind)) {
            // coordinates are printed with two decimals
            assert!((2.0 * x.1 - y.1).abs() <= 0.02, "{kind}: {} vs {}", x.1, y.1);
        }
    }
}

#[test]
fn empty_and_invalid_inputs() {
    let empty = PitData {
        metric_name: "pi".into(),
        center_value: 0.0,
        rows: vec![],
    };
    assert!(render_pit(&empty, &ChartStyle::default()).is_err());
    let tiny = ChartStyle {
        width: 10,
        ..ChartStyle::default()
    };
    assert!(render_pit(&fixture_pit(), &tiny).is_err());
}
