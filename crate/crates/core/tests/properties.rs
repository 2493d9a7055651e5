use proptest::prelude::*;

use pitplot_core::{
    apply_whatif, compute_pit, evaluate_portfolio, load_portfolio, validate_portfolio, MetricKind,
    PhaseId, PhaseSpec, PortfolioSpec, ProjectSpec, SimConfig, WhatIf,
};

const PHASES: [PhaseId; 4] = [PhaseId::Ph1, PhaseId::Ph2, PhaseId::Ph3, PhaseId::Reg];

fn project(id: String) -> impl Strategy<Value = ProjectSpec> {
    (
        0usize..4,
        1.0f64..2000.0,
        prop::collection::vec((1u32..6, 0.0f64..800.0, 0.05f64..=1.0), 4),
    )
        .prop_map(move |(start, peak, phases)| ProjectSpec {
            id: id.clone(),
            name: String::new(),
            peak_sales: peak,
            phases: PHASES[start..]
                .iter()
                .zip(phases)
                .map(|(&ph, (d, c, p))| PhaseSpec::new(ph, d, c, p))
                .collect(),
        })
}

fn portfolio() -> impl Strategy<Value = PortfolioSpec> {
    (2usize..7).prop_flat_map(|n| {
        (0..n)
            .map(|i| project(format!("X{i}")))
            .collect::<Vec<_>>()
            .prop_map(|projects| PortfolioSpec {
                name: "generated".into(),
                projects,
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn parsing_is_total(text in ".{0,200}") {
        let _ = load_portfolio(&text, "fuzz");
    }

    #[test]
    fn parsing_json_shaped_noise_is_total(
        peak in prop::num::f64::ANY,
        pos in prop::num::f64::ANY,
        dur in prop::num::f64::ANY,
        phase in "[A-Za-z0-9]{0,4}",
    ) {
        let text = serde_json::json!({
            "name": "n",
            "projects": [{"id": "A", "peak_sales": peak,
                "phases": [{"phase": phase, "duration": dur, "cost": 1.0, "pos": pos}]}]
        })
        .to_string();
        let _ = load_portfolio(&text, "fuzz");
    }

    #[test]
    fn round_trip_and_idempotent_validation(spec in portfolio()) {
        let validated = validate_portfolio(spec.clone()).unwrap();
        let text = validated.spec().to_json_pretty();
        let again = load_portfolio(&text, "round-trip").unwrap();
        prop_assert_eq!(again.spec(), &spec);
        let twice = validate_portfolio(again.into_inner()).unwrap();
        prop_assert_eq!(twice.spec(), &spec);
    }

    #[test]
    fn exclusions_compose(spec in portfolio(), a in 0usize..7, b in 0usize..7) {
        let p = validate_portfolio(spec).unwrap();
        let n = p.len();
        prop_assume!(n >= 3);
        let (a, b) = (p.projects()[a % n].id.clone(), p.projects()[b % n].id.clone());
        let stepwise = apply_whatif(&apply_whatif(&p, &WhatIf::exclude([a.clone()])).unwrap(), &WhatIf::exclude([b.clone()]));
        let joint = apply_whatif(&p, &WhatIf::exclude([a.clone(), b.clone()]));
        if a == b {
            // the second step names a project that is already gone
            prop_assert!(stepwise.is_err());
        } else {
            prop_assert_eq!(stepwise.unwrap().into_inner(), joint.unwrap().into_inner());
        }
    }

    #[test]
    fn forced_success_is_idempotent_and_certain(spec in portfolio(), k in 0usize..7) {
        let p = validate_portfolio(spec).unwrap();
        let id = p.projects()[k % p.len()].id.clone();
        let w = WhatIf { forced_success: [id.clone()].into(), ..WhatIf::default() };
        let once = apply_whatif(&p, &w).unwrap();
        let twice = apply_whatif(&once, &w).unwrap();
        prop_assert_eq!(once.spec(), twice.spec());
        prop_assert_eq!(once.project(&id).unwrap().success_probability(), 1.0);
        prop_assert_eq!(p.len(), once.len());
    }

    #[test]
    fn pit_invariants_on_random_portfolios(spec in portfolio(), q in 0.0f64..0.2) {
        let p = validate_portfolio(spec).unwrap();
        let cfg = SimConfig { discount_rate: q, ..SimConfig::analytic() };
        let evals = evaluate_portfolio(&p, &cfg).unwrap();
        let enpv = compute_pit(&evals, &MetricKind::Enpv).unwrap();
        for e in &evals {
            let own = e.totals.revenue - e.totals.cost;
            let d = enpv.row(&e.project_id).unwrap().delta_exclusion.unwrap();
            prop_assert!((d + own).abs() <= 1e-9 * own.abs().max(1.0));
        }
        if let Ok(pi) = compute_pit(&evals, &MetricKind::Pi) {
            let keys: Vec<f64> = pi.rows.iter().map(|r| r.delta_exclusion.unwrap_or(f64::INFINITY)).collect();
            prop_assert!(keys.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_per_seed(spec in portfolio(), seed in any::<u64>()) {
        let p = validate_portfolio(spec).unwrap();
        let cfg = SimConfig { iterations: 300, seed, ..SimConfig::default() };
        let a = compute_pit(&evaluate_portfolio(&p, &cfg).unwrap(), &MetricKind::Enpv).unwrap();
        let b = compute_pit(&evaluate_portfolio(&p, &cfg).unwrap(), &MetricKind::Enpv).unwrap();
        prop_assert_eq!(a, b);
    }
}
