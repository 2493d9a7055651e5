//! Cash-flow generation: seeded Monte Carlo sampling of phase gates, and the
//! exact expectation of the same model.

mod analytic;
mod ledger;
mod montecarlo;
mod schedule;
mod substream;

pub use analytic::{analytic_expectation, AnalyticExpectation};
pub use ledger::write_ledger;
pub use montecarlo::{simulate_portfolio, simulate_project, CashFlowSet, Outcome, BLOCK_SIZE};
pub use substream::RandomSubstream;
