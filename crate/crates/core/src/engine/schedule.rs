use crate::metrics::discount_factor;
use crate::model::{ProjectSpec, SimConfig};

/// Deterministic annual timeline of one project: phases back-to-back from
/// year 0, launch the year after Reg ends.
#[derive(Debug, Clone)]
pub(crate) struct Schedule {
    /// (first year, years, cost per year) for each remaining phase.
    phases: Vec<(usize, usize, f64)>,
    launch_year: usize,
    market_years: usize,
    ramp_years: usize,
    peak_sales: f64,
    discount_rate: f64,
}

impl Schedule {
    pub fn new(project: &ProjectSpec, config: &SimConfig) -> Self {
        let mut start = 0;
        let phases = project
            .phases
            .iter()
            .map(|p| {
                let years = p.duration_years().max(1);
                let window = (start, years, p.cost / years as f64);
                start += years;
                window
            })
            .collect();
        Self {
            phases,
            launch_year: start,
            market_years: config.market_years as usize,
            ramp_years: config.ramp_years as usize,
            peak_sales: project.peak_sales,
            discount_rate: config.discount_rate,
        }
    }

    pub fn phase_count(&self) -> usize {
        self.phases.len()
    }

    pub fn horizon(&self) -> usize {
        self.launch_year + self.market_years
    }

    pub fn discount(&self, year: usize) -> f64 {
        discount_factor(self.discount_rate, year)
    }

    /// Nominal cost by year when phases `0..phases_incurred` are paid for.
    pub fn nominal_cost(&self, phases_incurred: usize, horizon: usize) -> Vec<f64> {
        let mut row = vec![0.0; horizon];
        for &(start, years, annual) in &self.phases[..phases_incurred] {
            for cell in &mut row[start..start + years] {
                *cell = annual;
            }
        }
        row
    }

    /// Index of the phase active in `year`, if any.
    pub fn phase_at(&self, year: usize) -> Option<usize> {
        self.phases
            .iter()
            .position(|&(start, years, _)| year >= start && year < start + years)
    }

    /// Revenue multiplier for the k-th market year (0-based).
    fn ramp_factor(&self, k: usize) -> f64 {
        if self.ramp_years == 0 {
            1.0
        } else {
            ((k + 1) as f64 / self.ramp_years as f64).min(1.0)
        }
    }

    /// Nominal revenue by year on a successful launch.
    pub fn nominal_revenue(&self, horizon: usize) -> Vec<f64> {
        let mut row = vec![0.0; horizon];
        for k in 0..self.market_years {
            row[self.launch_year + k] = self.peak_sales * self.ramp_factor(k);
        }
        row
    }

    pub fn discounted(&self, nominal: &[f64]) -> Vec<f64> {
        nominal
            .iter()
            .enumerate()
            .map(|(t, v)| v * self.discount(t))
            .collect()
    }
}
