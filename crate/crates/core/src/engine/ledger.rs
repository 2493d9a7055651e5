use std::io::Write;

use super::montecarlo::CashFlowSet;

/// Writes one CSV record per (project, iteration, year) with nominal and
/// discounted flows, for external audit.
pub fn write_ledger<W: Write>(sets: &[CashFlowSet], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "project_id",
        "iteration",
        "year",
        "success",
        "nominal_cost",
        "cost",
        "nominal_revenue",
        "revenue",
    ])?;
    for cf in sets {
        for j in 0..cf.iterations() {
            let success = if cf.success(j) { "1" } else { "0" };
            let (nc, c) = (cf.nominal_cost_row(j), cf.cost_row(j));
            let (nr, r) = (cf.nominal_revenue_row(j), cf.revenue_row(j));
            for t in 0..cf.horizon_years() {
                w.write_record([
                    cf.project_id(),
                    &j.to_string(),
                    &t.to_string(),
                    success,
                    &nc[t].to_string(),
                    &c[t].to_string(),
                    &nr[t].to_string(),
                    &r[t].to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{simulate_project, RandomSubstream};
    use crate::model::{PhaseId, PhaseSpec, ProjectSpec, SimConfig};

    #[test]
    fn one_record_per_cell() {
        let p = ProjectSpec {
            id: "L".into(),
            name: String::new(),
            peak_sales: 100.0,
            phases: vec![PhaseSpec::new(PhaseId::Reg, 1, 40.0, 1.0)],
        };
        let cfg = SimConfig {
            iterations: 2,
            market_years: 2,
            discount_rate: 0.1,
            ..SimConfig::default()
        };
        let cf = simulate_project(&p, &cfg, &RandomSubstream::new(0, "L"));
        let mut buf = Vec::new();
        write_ledger(&[cf], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert_eq!(lines[1], "L,0,0,1,40,40,0,0");
        assert_eq!(lines[2], format!("L,0,1,1,0,0,100,{}", 100.0 / 1.1));
    }
}
