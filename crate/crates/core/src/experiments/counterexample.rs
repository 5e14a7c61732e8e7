use num_complex::Complex64;

use super::{Check, ExperimentConfig, Report, Table};
use crate::error::Result;
use crate::gamma_analysis::CenteredGammaLaw;
use crate::malliavin::strong_independence_defect;
use crate::simulation::{
    counterexample_chaos, counterexample_direct, dkw_bound, empirical_char_fn, empirical_moment, ks_distance,
    ks_two_sample, sample, SampleBatch, SignExpansionCoeffs,
};

const DEFAULTS: &[(&str, f64)] = &[
    ("independence", 1e-12),
    ("dkw_alpha", 1e-3),
    ("char_fn_factor", 5.0),
    ("ks_separation", 0.1),
    ("moment_sigmas", 5.0),
];

/// Order bound used by the chaos form of the counterexample.
pub const COUNTEREXAMPLE_MAX_ORDER: usize = 23;

/// 41 points evenly spaced on `[-2, 2]`.
pub fn char_fn_grid() -> Vec<f64> {
    (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect()
}

/// `E e^{itX}` for `X = A - 1`, `A ~ Exp(1)`.
pub fn char_fn_x(t: f64) -> Complex64 {
    let i = Complex64::i();
    (-i * t).exp() / (1.0 - i * t)
}

/// `E e^{itY}` for `Y = 2ϖB - 1`.
pub fn char_fn_y(t: f64) -> Complex64 {
    let i = Complex64::i();
    (-i * t).exp() * (1.0 - i * t) / (1.0 - 2.0 * i * t)
}

fn grid_check<F: Fn(f64) -> Complex64>(
    report: &mut Report,
    name: &str,
    batch: &SampleBatch,
    reference: F,
    tolerance: f64,
) -> Result<()> {
    let grid = char_fn_grid();
    let est = empirical_char_fn(batch, &grid)?;
    let mut table = Table::new(&["t", "re", "im", "ref_re", "ref_im"]);
    let mut worst = 0.0f64;
    for (&t, e) in grid.iter().zip(&est) {
        let r = reference(t);
        worst = worst.max((e - r).norm());
        table.push(vec![t, e.re, e.im, r.re, r.im]);
    }
    report.check(Check::at_most(format!("char_fn_{name}"), worst, tolerance));
    report.tables.insert(format!("char_fn_{name}"), table);
    Ok(())
}

/// Exponential/Bernoulli counterexample: direct sampling and the
/// truncated chaos construction.
pub fn counterexample(cfg: &ExperimentConfig) -> Result<Report> {
    let tol = cfg.tolerances(DEFAULTS)?;
    let mut report = Report::new("counterexample", cfg);
    let n = cfg.n_samples;
    let max_order = cfg.q_max.max(COUNTEREXAMPLE_MAX_ORDER);

    let (x, y) = counterexample_chaos(cfg.truncation, max_order)?;
    report.check(Check::at_most(
        "strong_independence_defect",
        strong_independence_defect(&x, &y)?,
        tol.get("independence"),
    ));
    let second = y.second_moment();
    report.check(Check::info("chaos_y_second_moment", second));
    report.check(Check::info("chaos_y_variance_deficit", 3.0 - second));

    let direct = counterexample_direct(n, cfg.seed, cfg.exec)?;
    let f2 = CenteredGammaLaw::new(2.0)?;
    let band = dkw_bound(n, tol.get("dkw_alpha"));
    report.check(Check::at_most("ks_z_vs_f2", ks_distance(&direct.z, &f2)?, band));
    for nu in [1.0, 2.0, 3.0] {
        let law = CenteredGammaLaw::new(nu)?;
        report.check(Check::above(
            format!("ks_y_vs_f{nu}"),
            ks_distance(&direct.y, &law)?,
            tol.get("ks_separation"),
        ));
    }

    let cf_tol = tol.get("char_fn_factor") / (n as f64).sqrt();
    grid_check(&mut report, "x", &direct.x, char_fn_x, cf_tol)?;
    grid_check(&mut report, "y", &direct.y, char_fn_y, cf_tol)?;
    grid_check(&mut report, "z", &direct.z, |t| f2.char_fn(t), cf_tol)?;

    let sigmas = tol.get("moment_sigmas");
    let m2 = empirical_moment(&direct.y, 2)?;
    report.check(Check::at_most(
        "direct_y_second_moment",
        (m2.mean - 3.0).abs(),
        sigmas * m2.std_error,
    ));

    let chaos_seed = cfg.seed.wrapping_add(1);
    let chaos_y = sample(&y, n, chaos_seed, cfg.exec)?;
    for p in [1, 2] {
        let a = empirical_moment(&chaos_y, p)?;
        let b = empirical_moment(&direct.y, p)?;
        let deficit = if p == 2 { 3.0 - second } else { 0.0 };
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        report.check(Check::at_most(
            format!("chaos_vs_direct_moment_{p}"),
            (a.mean - b.mean).abs(),
            deficit + sigmas * se,
        ));
    }

    let mut ks_table = Table::new(&["k", "ks_chaos_vs_direct", "second_moment"]);
    for k in [3usize, 6, 9].into_iter().filter(|&k| 2 * k + 3 <= max_order) {
        let (_, yk) = counterexample_chaos(k, max_order)?;
        let batch = sample(&yk, n, chaos_seed, cfg.exec)?;
        let ks = ks_two_sample(&batch, &direct.y)?;
        ks_table.push(vec![k as f64, ks, yk.second_moment()]);
        report.check(Check::info(format!("ks_chaos_k{k}_vs_direct"), ks));
    }
    report.tables.insert("truncation".into(), ks_table);

    let coeffs = SignExpansionCoeffs::new(cfg.truncation);
    report.check(Check::info("sign_partial_sum_at_2", coeffs.partial_sum(2.0)));

    report.notes.push(if report.passed {
        "Z is F(2); Y is NOT Gamma".to_string()
    } else {
        "verdict withheld: at least one check failed".to_string()
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_char_fns_at_zero() {
        assert_eq!(char_fn_x(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(char_fn_y(0.0), Complex64::new(1.0, 0.0));
        // X + Y has the F(2) transform
        let law = CenteredGammaLaw::new(2.0).unwrap();
        for t in char_fn_grid() {
            assert!((char_fn_x(t) * char_fn_y(t) - law.char_fn(t)).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_shape() {
        let g = char_fn_grid();
        assert_eq!(g.len(), 41);
        assert!((g[40] - 2.0).abs() < 1e-12 && g[20].abs() < 1e-12);
    }
}
