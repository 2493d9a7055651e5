//! Bundled example inputs.

/// Ten-project drug development portfolio.
pub const EXAMPLE_PORTFOLIO: &str = include_str!("../../../fixtures/example_portfolio.json");

/// Manufacturing total-cost scenario with ±10% input points.
pub const COST_TORNADO: &str = include_str!("../../../fixtures/cost_tornado.json");

/// Undiscounted config, 10 market years, flat revenue.
pub const CONFIG_DEFAULT: &str = include_str!("../../../fixtures/config_default.json");

/// Same as [`CONFIG_DEFAULT`] with a 10% discount rate.
pub const CONFIG_DISCOUNTED: &str = include_str!("../../../fixtures/config_discounted.json");

pub fn example_portfolio() -> crate::ValidatedPortfolio {
    crate::load_portfolio(EXAMPLE_PORTFOLIO, "example_portfolio.json").expect("bundled fixture is valid")
}

pub fn cost_tornado() -> crate::tornado::ExpressionScenario {
    crate::tornado::ExpressionScenario::from_json(COST_TORNADO).expect("bundled fixture parses")
}
