"""Smoke test for the `pitplot` extension module.

Build and run from the repository root:

    cargo build --release -p pitplot-python
    cp target/release/libpitplot.so python/pitplot.so   # pitplot.pyd on Windows
    python3 python/smoke_test.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pitplot  # noqa: E402

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def fixture(name):
    return os.path.join(ROOT, "fixtures", name)


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    portfolio = pitplot.Portfolio.from_file(fixture("example_portfolio.json"))
    assert len(portfolio) == 10, portfolio
    assert portfolio.project_ids[0] == "P1"

    analytic = pitplot.Config(engine="analytic")
    p4 = pitplot.expectation(portfolio, "P4", analytic)
    assert close(p4["expected_cost"], 528.0) and close(p4["expected_revenue"], 2660.0), p4

    summary = pitplot.simulate(portfolio, pitplot.Config(iterations=20000, seed=42))
    assert abs(summary["P4"]["mean_cost"] - 528.0) / 528.0 < 0.005, summary["P4"]

    result = pitplot.pit(portfolio, "pi", analytic)
    assert result.metric == "pi"
    assert len(result.rows) == 10
    assert set(result.order[-2:]) == {"P1", "P5"}, result.order
    assert result.row("P4").delta_exclusion < 0
    assert result.to_svg().count('class="pit-row"') == 10
    assert result.to_text().startswith("PIT-plot")
    assert json.loads(result.to_json())["metric_name"] == "pi"

    enpv = pitplot.pit(portfolio, "enpv", analytic)
    for row in enpv.rows:
        assert close(row.delta_exclusion, -row.project_metric), row

    baseline, scenario, report = pitplot.whatif(
        portfolio, exclude=["P1", "P5"], metric="pi", config=analytic
    )
    assert len(baseline.rows) == 10 and len(scenario.rows) == 8
    assert "comparison" in json.loads(report)
    forced = portfolio.whatif(force_success=["P9"])
    assert pitplot.pit(forced, "pi", analytic).row("P9").delta_success == 0.0

    with open(fixture("cost_tornado.json")) as f:
        cost_scenario = pitplot.scenario_tornado(f.read())
    assert [r[0] for r in cost_scenario.rows] == ["variable_cost", "items_produced", "fixed_cost"]
    assert cost_scenario.rows[0][1:4] == (840.0, 900.0, 960.0)

    custom = pitplot.tornado(
        lambda v: v["fixed_cost"] + v["variable_cost"] * v["items_produced"],
        [("fixed_cost", 270, 300, 330), ("variable_cost", 9, 10, 11), ("items_produced", 55, 60, 65)],
        outcome="total_cost",
    )
    assert custom.rows == cost_scenario.rows, custom.rows

    shift = pitplot.portfolio_tornado(
        portfolio, [("P4", "Ph3.pos", 0.63, 0.77)], metric="enpv", config=analytic
    )
    _, low, base, high, _ = shift.rows[0]
    assert close(high - base, 0.07 * (0.95 * 4000 - 40), 1e-6)

    with open(fixture("example_portfolio.json")) as f:
        doc = json.load(f)
    doc["projects"][3]["phases"][0]["pos"] = 1.2
    problems = pitplot.validate(json.dumps(doc))
    assert problems == [("P4", "Ph3.pos", problems[0][2])], problems
    try:
        pitplot.Portfolio.from_json(json.dumps(doc))
    except pitplot.ValidationError:
        pass
    else:
        raise AssertionError("invalid portfolio accepted")
    try:
        portfolio.whatif(exclude=["P99"])
    except pitplot.NotFoundError:
        pass
    else:
        raise AssertionError("unknown id accepted")

    print("pitplot", pitplot.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
