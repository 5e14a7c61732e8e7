use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rel_err, Check, ExperimentConfig, Report};
use crate::chaos_algebra::ChaosElement;
use crate::combinatorics::factorial;
use crate::error::Result;
use crate::gamma_analysis::{
    chaos_criterion_distance, criterion_distance_within, fourth_moment_decomposition, fourth_moment_formula,
    third_moment_formula,
};
use crate::malliavin::grad_norm_sq_within;
use crate::simulation::{random_orthogonal, substream, GaussianPoint};
use crate::tensor_kernels::SymmetricKernel;

const DEFAULTS: &[(&str, f64)] = &[
    ("product_formula", 1e-9),
    ("isometry", 1e-10),
    ("third_moment", 1e-9),
    ("fourth_moment", 1e-9),
    ("decomposition", 1e-9),
    ("gamma_zero", 1e-10),
    ("criterion_scaling", 1e-9),
    ("finite_difference", 1e-5),
    ("rotation", 1e-8),
];

fn random_element(dim: usize, order: usize, rng: &mut ChaCha8Rng) -> Result<ChaosElement> {
    ChaosElement::from_kernel(SymmetricKernel::random(dim, order, rng))
}

fn random_mixed(dim: usize, top: usize, rng: &mut ChaCha8Rng) -> Result<ChaosElement> {
    let kernels: Vec<_> = (1..=top).map(|q| SymmetricKernel::random(dim, q, rng)).collect();
    ChaosElement::from_parts(dim, 0.0, kernels)
}

/// Product formula, isometry, moment formulas against the brute-force
/// oracle, the fourth-moment decomposition, the Gamma criterion on exact
/// builds, the gradient against finite differences and rotation invariance.
pub fn verify_identities(cfg: &ExperimentConfig) -> Result<Report> {
    let tol = cfg.tolerances(DEFAULTS)?;
    let mut report = Report::new("verify-identities", cfg);
    let d = cfg.dimension.min(3);
    let q_max = cfg.q_max;
    let mut rng = substream(cfg.seed, 0);

    let mut worst = 0.0f64;
    for _ in 0..40 {
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let f = random_element(d, m, &mut rng)?;
        let g = random_element(d, n, &mut rng)?;
        let prod = f.multiply_within(&g, q_max)?;
        for _ in 0..100 {
            let x = GaussianPoint::sample(d, &mut rng);
            let lhs = f.evaluate(&x)? * g.evaluate(&x)?;
            worst = worst.max(rel_err(lhs, prod.evaluate(&x)?));
        }
    }
    report.check(Check::at_most("product_formula", worst, tol.get("product_formula")));

    let mut worst = 0.0f64;
    for _ in 0..40 {
        let n = rng.gen_range(1..=4);
        let f = SymmetricKernel::random(d, n, &mut rng);
        let g = SymmetricKernel::random(d, n, &mut rng);
        let prod = ChaosElement::from_kernel(f.clone())?.multiply_within(&ChaosElement::from_kernel(g.clone())?, q_max)?;
        worst = worst.max(rel_err(prod.expectation(), factorial(n) * f.inner_product(&g)?));
    }
    report.check(Check::at_most("isometry", worst, tol.get("isometry")));

    let (mut w3, mut w4) = (0.0f64, 0.0f64);
    for i in 0..40 {
        let q = if i % 2 == 0 { 2 } else { 4 };
        let f = SymmetricKernel::random(d, q, &mut rng);
        let x = ChaosElement::from_kernel(f.clone())?;
        w3 = w3.max(rel_err(third_moment_formula(&f)?.value, x.exact_moment_within(3, q_max)?));
        w4 = w4.max(rel_err(fourth_moment_formula(&f)?, x.exact_moment_within(4, q_max)?));
    }
    report.check(Check::at_most("third_moment", w3, tol.get("third_moment")));
    report.check(Check::at_most("fourth_moment", w4, tol.get("fourth_moment")));

    let mut worst = 0.0f64;
    for i in 0..20 {
        let q = if i % 2 == 0 { 2 } else { 4 };
        let f = SymmetricKernel::random(d, q, &mut rng);
        let nu = 0.5 * factorial(q) * f.norm_sq();
        let r = fourth_moment_decomposition(&f, nu)?;
        let scale = 12.0 * nu * nu + 48.0 * nu + r.decomposition_terms["sum"];
        worst = worst.max(r.decomposition_terms["identity_residual"].abs() / scale.max(1.0));
    }
    report.check(Check::at_most("decomposition", worst, tol.get("decomposition")));

    let gamma = ChaosElement::from_kernel(
        SymmetricKernel::basis(2, &[0, 0])?.add(&SymmetricKernel::basis(2, &[1, 1])?)?,
    )?;
    let zero = criterion_distance_within(&gamma, 2.0, q_max)?;
    report.check(Check::at_most("gamma_zero", zero, tol.get("gamma_zero")));

    let mut worst = 0.0f64;
    for i in 0..10 {
        let q = 1 + i % 3;
        let f = SymmetricKernel::random(d, q, &mut rng);
        let nu = rng.gen_range(0.5..3.0);
        let x = ChaosElement::from_kernel(f.clone())?;
        let plain = criterion_distance_within(&x, nu, q_max)?;
        worst = worst.max(rel_err(chaos_criterion_distance(&f, nu)?, (q * q) as f64 * plain));
    }
    report.check(Check::at_most("criterion_scaling", worst, tol.get("criterion_scaling")));

    let mut worst = 0.0f64;
    let h = 1e-5;
    for _ in 0..20 {
        let f = random_mixed(d, 3, &mut rng)?;
        let grad = grad_norm_sq_within(&f, q_max)?;
        let x: Vec<f64> = GaussianPoint::sample(d, &mut rng).coords().to_vec();
        let mut fd = 0.0;
        for j in 0..d {
            let (mut up, mut down) = (x.clone(), x.clone());
            up[j] += h;
            down[j] -= h;
            let dj = (f.evaluate_coords(&up)? - f.evaluate_coords(&down)?) / (2.0 * h);
            fd += dj * dj;
        }
        worst = worst.max(rel_err(fd, grad.evaluate_coords(&x)?));
    }
    report.check(Check::at_most("finite_difference", worst, tol.get("finite_difference")));

    let mut worst = 0.0f64;
    let rd = cfg.dimension.clamp(2, 4);
    for _ in 0..5 {
        let f = random_mixed(rd, 2, &mut rng)?;
        let rot = f.change_basis(&random_orthogonal(rd, &mut rng))?;
        for p in 2..=4 {
            worst = worst.max(rel_err(rot.exact_moment_within(p, q_max)?, f.exact_moment_within(p, q_max)?));
        }
        worst = worst.max(rel_err(
            criterion_distance_within(&rot, 1.0, q_max)?,
            criterion_distance_within(&f, 1.0, q_max)?,
        ));
    }
    report.check(Check::at_most("rotation", worst, tol.get("rotation")));

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ChaosError;

    #[test]
    fn default_run_passes_and_is_deterministic() {
        let cfg = ExperimentConfig::default();
        let a = verify_identities(&cfg).unwrap();
        assert!(a.passed, "{:?}", a.first_failure());
        assert_eq!(a.to_json(), verify_identities(&cfg).unwrap().to_json());
    }

    #[test]
    fn small_order_bound_is_a_config_error() {
        let cfg = ExperimentConfig {
            q_max: 2,
            ..Default::default()
        };
        assert!(matches!(verify_identities(&cfg), Err(ChaosError::OrderOverflow { .. })));
    }
}
