use super::{Check, ExperimentConfig, Report};
use crate::error::Result;
use crate::gamma_analysis::cramer_split_check;
use crate::tensor_kernels::SymmetricKernel;

const DEFAULTS: &[(&str, f64)] = &[
    ("total_distance", 1e-9),
    ("component_distance", 1e-9),
    ("additive_residual", 1e-9),
    ("negative_control", 0.5),
];

const DIM: usize = 6;

/// Exact value of the negative-control distance `E[(2 + 2Y - G_Y)^2]` for
/// `Y = sqrt(2) I_2(basis_kernel(2, 3))`: here `G_Y = x_2^2 + x_3^2`.
pub const NEGATIVE_CONTROL_DISTANCE: f64 = 12.0;

fn diag(indices: &[usize]) -> Result<SymmetricKernel> {
    let mut acc = SymmetricKernel::zero(DIM, 2);
    for &i in indices {
        acc = acc.add(&SymmetricKernel::basis(DIM, &[i, i])?)?;
    }
    Ok(acc)
}

/// `F(2) ⊕ F(4)` on disjoint directions, plus a non-Gamma negative control.
pub fn cramer_demo(cfg: &ExperimentConfig) -> Result<Report> {
    let tol = cfg.tolerances(DEFAULTS)?;
    let mut report = Report::new("cramer-demo", cfg);

    let f = diag(&[0, 1])?;
    let h = diag(&[2, 3, 4, 5])?;
    let pos = cramer_split_check(&f, &h, 2.0, 4.0)?;
    let (dx, dy) = pos.component_distances.unwrap_or_default();
    report.check(Check::at_most("positive.total_distance", pos.distance, tol.get("total_distance")));
    report.check(Check::at_most("positive.x_distance", dx, tol.get("component_distance")));
    report.check(Check::at_most("positive.y_distance", dy, tol.get("component_distance")));
    report.check(Check::at_most(
        "positive.additive_residual",
        pos.decomposition_terms["additive_residual"].abs(),
        tol.get("additive_residual"),
    ));

    let neg_h = SymmetricKernel::basis(DIM, &[2, 3])?.scale(2f64.sqrt());
    let neg = cramer_split_check(&f, &neg_h, 2.0, 1.0)?;
    let (nx, ny) = neg.component_distances.unwrap_or_default();
    report.check(Check::at_most("negative.x_distance", nx, tol.get("component_distance")));
    report.check(Check::above("negative.y_distance", ny, tol.get("negative_control")));
    report.check(Check::at_most(
        "negative.y_distance_regression",
        (ny - NEGATIVE_CONTROL_DISTANCE).abs(),
        tol.get("additive_residual"),
    ));
    report.check(Check::at_most(
        "negative.additive_residual",
        neg.decomposition_terms["additive_residual"].abs(),
        tol.get("additive_residual"),
    ));
    report.check(Check::info("negative.total_distance", neg.distance));

    for (label, r) in [("positive", &pos), ("negative", &neg)] {
        for (k, v) in r.decomposition_terms.iter().filter(|(k, _)| *k != "additive_residual") {
            report.check(Check::info(format!("{label}.{k}"), *v));
        }
    }
    report.notes.push(format!(
        "positive split F(2) + F(4): verdict {:?}; negative control Y = sqrt(2) I_2(e_2 e_3): verdict {:?}",
        pos.verdict, neg.verdict
    ));
    Ok(report)
}
