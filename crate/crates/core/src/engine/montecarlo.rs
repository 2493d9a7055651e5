use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::schedule::Schedule;
use super::substream::RandomSubstream;
use crate::model::{PhaseId, ProjectSpec, Sampling, SimConfig, ValidatedPortfolio};

/// Iterations drawn from one generator before moving to the next block key.
pub const BLOCK_SIZE: usize = 8192;

/// How a single iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// Failed the gate at the end of this phase.
    FailedAt(PhaseId),
    Launched,
}

/// Flows for every iteration that ended the same way.
#[derive(Debug, Clone, PartialEq)]
struct PathFlows {
    nominal_cost: Vec<f64>,
    nominal_revenue: Vec<f64>,
    cost: Vec<f64>,
    revenue: Vec<f64>,
    cost_total: f64,
    revenue_total: f64,
}

impl PathFlows {
    fn new(schedule: &Schedule, phases_incurred: usize, launched: bool, horizon: usize) -> Self {
        let nominal_cost = schedule.nominal_cost(phases_incurred, horizon);
        let nominal_revenue = if launched {
            schedule.nominal_revenue(horizon)
        } else {
            vec![0.0; horizon]
        };
        let cost = schedule.discounted(&nominal_cost);
        let revenue = schedule.discounted(&nominal_revenue);
        Self {
            cost_total: row_sum(&cost),
            revenue_total: row_sum(&revenue),
            nominal_cost,
            nominal_revenue,
            cost,
            revenue,
        }
    }

    fn pad(&mut self, horizon: usize) {
        for row in [
            &mut self.nominal_cost,
            &mut self.nominal_revenue,
            &mut self.cost,
            &mut self.revenue,
        ] {
            row.resize(horizon, 0.0);
        }
    }
}

/// Year-ordered sum; the same accumulation order is used everywhere a row
/// total is needed.
pub(crate) fn row_sum(row: &[f64]) -> f64 {
    row.iter().fold(0.0, |acc, v| acc + v)
}

/// Per-iteration annual cash flows for one project.
///
/// Timing is deterministic given where an iteration stopped, so the J × T
/// ledgers are stored as one row template per outcome plus the outcome of
/// each iteration. Row accessors return exactly the cells of the dense
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CashFlowSet {
    project_id: String,
    phases: Vec<PhaseId>,
    horizon: usize,
    /// Index `k < phases.len()` = failed at phase k; `phases.len()` = launched.
    paths: Vec<PathFlows>,
    outcomes: Vec<u8>,
    counts: Vec<usize>,
}

impl CashFlowSet {
    fn from_outcomes(project: &ProjectSpec, config: &SimConfig, outcomes: Vec<u8>) -> Self {
        let schedule = Schedule::new(project, config);
        let n = schedule.phase_count();
        let horizon = schedule.horizon();
        let paths = (0..=n)
            .map(|k| {
                let launched = k == n;
                let incurred = if launched { n } else { k + 1 };
                PathFlows::new(&schedule, incurred, launched, horizon)
            })
            .collect();
        let mut counts = vec![0; n + 1];
        for &o in &outcomes {
            counts[o as usize] += 1;
        }
        Self {
            project_id: project.id.clone(),
            phases: project.phases.iter().map(|p| p.phase).collect(),
            horizon,
            paths,
            outcomes,
            counts,
        }
    }

    /// Extends every row with zero years up to `horizon`.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        if horizon > self.horizon {
            for p in &mut self.paths {
                p.pad(horizon);
            }
            self.horizon = horizon;
        }
        self
    }

    pub fn project_id(&self) -> &str {
        &self.project_id
    }

    pub fn horizon_years(&self) -> usize {
        self.horizon
    }

    pub fn iterations(&self) -> usize {
        self.outcomes.len()
    }

    fn path(&self, j: usize) -> &PathFlows {
        &self.paths[self.outcomes[j] as usize]
    }

    fn launch_index(&self) -> usize {
        self.phases.len()
    }

    pub fn outcome(&self, j: usize) -> Outcome {
        let k = self.outcomes[j] as usize;
        if k == self.launch_index() {
            Outcome::Launched
        } else {
            Outcome::FailedAt(self.phases[k])
        }
    }

    /// Iteration `j` passed every remaining gate and reached the market.
    pub fn success(&self, j: usize) -> bool {
        self.outcomes[j] as usize == self.launch_index()
    }

    pub fn success_flags(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.iterations()).map(|j| self.success(j))
    }

    pub fn success_count(&self) -> usize {
        self.counts[self.launch_index()]
    }

    pub fn success_fraction(&self) -> f64 {
        self.success_count() as f64 / self.iterations() as f64
    }

    /// Discounted cost row c_jt.
    pub fn cost_row(&self, j: usize) -> &[f64] {
        &self.path(j).cost
    }

    /// Discounted revenue row r_jt.
    pub fn revenue_row(&self, j: usize) -> &[f64] {
        &self.path(j).revenue
    }

    pub fn nominal_cost_row(&self, j: usize) -> &[f64] {
        &self.path(j).nominal_cost
    }

    pub fn nominal_revenue_row(&self, j: usize) -> &[f64] {
        &self.path(j).nominal_revenue
    }

    pub fn cost(&self, j: usize, t: usize) -> f64 {
        self.cost_row(j)[t]
    }

    pub fn revenue(&self, j: usize, t: usize) -> f64 {
        self.revenue_row(j)[t]
    }

    pub fn cost_total(&self, j: usize) -> f64 {
        self.path(j).cost_total
    }

    pub fn revenue_total(&self, j: usize) -> f64 {
        self.path(j).revenue_total
    }

    /// Mean over all iterations of year-summed discounted cost.
    pub fn mean_cost(&self) -> f64 {
        let j = self.iterations() as f64;
        self.paths
            .iter()
            .zip(&self.counts)
            .filter(|(_, &n)| n > 0)
            .fold(0.0, |acc, (p, &n)| acc + (n as f64 / j) * p.cost_total)
    }

    /// Mean over all iterations of year-summed discounted revenue.
    /// Only launched iterations carry revenue.
    pub fn mean_revenue(&self) -> f64 {
        self.success_fraction() * self.paths[self.launch_index()].revenue_total
    }

    /// Mean discounted cost over launched iterations, if there are any.
    pub fn success_mean_cost(&self) -> Option<f64> {
        (self.success_count() > 0).then(|| self.paths[self.launch_index()].cost_total)
    }

    /// Mean discounted revenue over launched iterations, if there are any.
    pub fn success_mean_revenue(&self) -> Option<f64> {
        (self.success_count() > 0).then(|| self.paths[self.launch_index()].revenue_total)
    }
}

/// Stream index reserved for the stratum permutation.
const PERMUTATION_BLOCK: u64 = u64::MAX;

/// Index of the first gate failed by `u`, or `pos.len()` for a launch.
///
/// `u` is reused across gates: given a pass (`u < p`), `u / p` is again
/// uniform on [0, 1).
fn gate_outcome(pos: &[f64], mut u: f64) -> u8 {
    for (k, &p) in pos.iter().enumerate() {
        if p >= 1.0 {
            continue;
        }
        if u >= p {
            return k as u8;
        }
        u /= p;
    }
    pos.len() as u8
}

fn sample_block(
    pos: &[f64],
    substream: &RandomSubstream,
    block: usize,
    len: usize,
    strata: Option<&[u32]>,
) -> Vec<u8> {
    let mut rng = substream.block_rng(block as u64);
    let first = block * BLOCK_SIZE;
    (0..len)
        .map(|i| match strata {
            Some(strata) => {
                let u = (strata[first + i] as f64 + rng.random::<f64>()) / strata.len() as f64;
                gate_outcome(pos, u)
            }
            None => pos
                .iter()
                .position(|&p| rng.random::<f64>() >= p)
                .unwrap_or(pos.len()) as u8,
        })
        .collect()
}

fn strata(substream: &RandomSubstream, iterations: usize) -> Vec<u32> {
    let mut order: Vec<u32> = (0..iterations as u32).collect();
    order.shuffle(&mut substream.block_rng(PERMUTATION_BLOCK));
    order
}

/// Simulates `config.iterations` runs of one project.
///
/// Gates are Bernoulli trials at each phase end; the failed phase's cost is
/// fully incurred and nothing follows it. Under [`Sampling::Stratified`]
/// each iteration is still an exact draw of the gate sequence, but the
/// iterations jointly cover [0, 1) evenly, which removes most of the
/// sampling noise from outcome frequencies.
pub fn simulate_project(
    project: &ProjectSpec,
    config: &SimConfig,
    substream: &RandomSubstream,
) -> CashFlowSet {
    let pos: Vec<f64> = project.phases.iter().map(|p| p.pos).collect();
    let iterations = config.iterations;
    let strata = match config.sampling {
        Sampling::Stratified => Some(strata(substream, iterations)),
        Sampling::Independent => None,
    };
    let blocks = iterations.div_ceil(BLOCK_SIZE);
    let outcomes: Vec<u8> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_SIZE.min(iterations - b * BLOCK_SIZE);
            sample_block(&pos, substream, b, len, strata.as_deref())
        })
        .flatten_iter()
        .collect();
    CashFlowSet::from_outcomes(project, config, outcomes)
}

/// Simulates every project on its own substream and pads all sets to the
/// portfolio horizon.
pub fn simulate_portfolio(portfolio: &ValidatedPortfolio, config: &SimConfig) -> Vec<CashFlowSet> {
    let sets: Vec<CashFlowSet> = portfolio
        .projects()
        .par_iter()
        .map(|p| simulate_project(p, config, &RandomSubstream::new(config.seed, p.id.as_str())))
        .collect();
    let horizon = sets.iter().map(CashFlowSet::horizon_years).max().unwrap_or(0);
    sets.into_iter().map(|s| s.with_horizon(horizon)).collect()
}
