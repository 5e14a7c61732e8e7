use super::{Check, ExperimentConfig, Report, Table};
use crate::error::Result;
use crate::gamma_analysis::asymptotic_criterion;
use crate::tensor_kernels::SymmetricKernel;

const DEFAULTS: &[(&str, f64)] = &[("final_distance", 0.05), ("far_distance", 1e-3)];

pub const STEPS: usize = 50;
pub const FAR_STEP: usize = 1000;

/// `f_k = (1 - 1/k)(e_0⊗e_0 + e_1⊗e_1)`, `h_k = (1 - 1/k)(e_2⊗e_2 + e_3⊗e_3)`
/// on four directions.
pub fn asymptotic_family(k: usize) -> Result<(SymmetricKernel, SymmetricKernel)> {
    let s = 1.0 - 1.0 / k as f64;
    let pair = |a: usize, b: usize| -> Result<SymmetricKernel> {
        Ok(SymmetricKernel::basis(4, &[a, a])?
            .add(&SymmetricKernel::basis(4, &[b, b])?)?
            .scale(s))
    };
    Ok((pair(0, 1)?, pair(2, 3)?))
}

/// Exact Gamma-criterion distances along the family against `F(2) ⊕ F(2)`.
pub fn asymptotic(cfg: &ExperimentConfig) -> Result<Report> {
    let tol = cfg.tolerances(DEFAULTS)?;
    let mut report = Report::new("asymptotic", cfg);
    let mut ks: Vec<usize> = (1..=STEPS).collect();
    ks.push(FAR_STEP);
    let seq = ks.iter().map(|&k| asymptotic_family(k)).collect::<Result<Vec<_>>>()?;
    let reports = asymptotic_criterion(&seq, 2.0, 2.0, cfg.exec)?;

    let mut table = Table::new(&["k", "distance", "x_distance", "y_distance"]);
    for (&k, r) in ks.iter().zip(&reports) {
        let (dx, dy) = r.component_distances.unwrap_or_default();
        table.push(vec![k as f64, r.distance, dx, dy]);
    }
    let d: Vec<f64> = reports.iter().map(|r| r.distance).collect();
    let increases = d.windows(2).filter(|w| w[1] >= w[0]).count();
    report.check(Check::at_most("non_decreasing_steps", increases as f64, 0.0));
    let last = d[STEPS - 1];
    report.check(Check::above("drop_from_k2_to_k50", d[1] - last, 0.0));
    report.check(Check::at_most("distance_k50", last, tol.get("final_distance")));
    report.check(Check::at_most("distance_k1000", d[STEPS], tol.get("far_distance")));
    report.tables.insert("distances".into(), table);
    Ok(report)
}
