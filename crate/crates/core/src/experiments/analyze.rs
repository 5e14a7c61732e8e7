use super::{Check, ExperimentConfig, Report};
use crate::chaos_algebra::ChaosElement;
use crate::error::{ChaosError, Result};
use crate::gamma_analysis::{criterion_distance_within, fourth_moment_decomposition, Verdict, ZERO_TOLERANCE};

const DEFAULTS: &[(&str, f64)] = &[("gamma_zero", ZERO_TOLERANCE)];

/// Moments and the Gamma criterion for a user-supplied element. `nu`
/// defaults to half the variance.
pub fn analyze(element: &ChaosElement, nu: Option<f64>, cfg: &ExperimentConfig) -> Result<Report> {
    let tol = cfg.tolerances(DEFAULTS)?;
    let mut report = Report::new("analyze", cfg);
    let x = element.centered();
    let nu = nu.unwrap_or_else(|| 0.5 * x.variance());
    if !(nu > 0.0) {
        return Err(ChaosError::InvalidParameter(format!("nu must be positive, got {nu}")));
    }
    report.check(Check::info("expectation", element.expectation()));
    report.check(Check::info("nu", nu));
    for p in 2..=4 {
        match x.exact_moment_within(p, cfg.q_max) {
            Ok(m) => report.check(Check::info(format!("centered_moment_{p}"), m)),
            Err(ChaosError::OrderOverflow { .. }) => {
                report.notes.push(format!("centered moment {p} skipped: exceeds q_max = {}", cfg.q_max))
            }
            Err(e) => return Err(e),
        }
    }
    let distance = criterion_distance_within(&x, nu, cfg.q_max)?;
    report.check(Check::info("criterion_distance", distance));

    let mut kernels = x.kernels();
    if let (Some(f), None) = (kernels.next(), kernels.next()) {
        let q = f.order();
        if q % 2 == 0 && (0.5 * x.variance() - nu).abs() <= 1e-8 * nu.max(1.0) {
            let r = fourth_moment_decomposition(f, nu)?;
            for (k, v) in &r.decomposition_terms {
                report.check(Check::info(format!("decomposition.{k}"), *v));
            }
        }
    }
    let verdict = Verdict::from_distance(distance, tol.get("gamma_zero"));
    report.notes.push(match verdict {
        Verdict::Gamma => format!("centered element is F({nu})"),
        Verdict::NotGamma => format!("centered element is not F({nu})"),
    });
    Ok(report)
}
