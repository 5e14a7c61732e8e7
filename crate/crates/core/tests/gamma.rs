mod common;

use chaoscalc::combinatorics::factorial;
use chaoscalc::gamma_analysis::special::{ln_gamma, regularized_lower_gamma};
use chaoscalc::gamma_analysis::{
    cramer_split_check, criterion_distance, fourth_moment_decomposition, fourth_moment_formula, third_moment_formula,
};
use chaoscalc::simulation::{dkw_bound, ks_distance};
use chaoscalc::{CenteredGammaLaw, SampleBatch, SymmetricKernel};
use common::{chaos, diag, rel_err, rng};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Gamma};

fn embed(k: &SymmetricKernel, d: usize, offset: usize) -> SymmetricKernel {
    SymmetricKernel::from_values(
        d,
        k.order(),
        k.iter()
            .map(|(m, v)| (m.entries().iter().map(|&i| i as usize + offset).collect(), v)),
    )
    .unwrap()
}

#[test]
fn moment_formulas_match_oracle() {
    let mut r = rng(100);
    for i in 0..100 {
        let q = if i % 2 == 0 { 2 } else { 4 };
        let d = r.gen_range(1..=3);
        let f = SymmetricKernel::random(d, q, &mut r);
        let x = chaos(f.clone());
        let m3 = x.exact_moment(3).unwrap();
        let m4 = x.exact_moment(4).unwrap();
        assert!(rel_err(third_moment_formula(&f).unwrap().value, m3) <= 1e-9, "q={q} d={d}");
        assert!(rel_err(fourth_moment_formula(&f).unwrap(), m4) <= 1e-9, "q={q} d={d}");
    }
}

#[test]
fn odd_order_moments() {
    let f = SymmetricKernel::random(2, 3, &mut rng(5));
    let x = chaos(f.clone());
    assert!(third_moment_formula(&f).unwrap().odd_order);
    assert!(x.exact_moment(3).unwrap().abs() < 1e-12);
    assert!(rel_err(fourth_moment_formula(&f).unwrap(), x.exact_moment(4).unwrap()) < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn decomposition_consistency(d in 1usize..=3, half in 1usize..=2, seed in any::<u64>()) {
        let q = 2 * half;
        let f = SymmetricKernel::random(d, q, &mut rng(seed));
        let nu = 0.5 * factorial(q) * f.norm_sq();
        let r = fourth_moment_decomposition(&f, nu).unwrap();
        let lhs = fourth_moment_formula(&f).unwrap() - 12.0 * third_moment_formula(&f).unwrap().value
            - (12.0 * nu * nu - 48.0 * nu);
        let sum = r.decomposition_terms["sum"];
        prop_assert!(rel_err(lhs, sum) <= 1e-9);
        for (name, v) in &r.decomposition_terms {
            if name != "identity_residual" {
                prop_assert!(*v >= -1e-12, "{} = {}", name, v);
            }
        }
    }

    #[test]
    fn additivity_on_disjoint_bases(q1 in 1usize..=2, q2 in 1usize..=2, seed in any::<u64>()) {
        let mut r = rng(seed);
        let (q1, q2) = (2 * q1, 2 * q2);
        let f = embed(&SymmetricKernel::random(2, q1, &mut r), 4, 0);
        let h = embed(&SymmetricKernel::random(2, q2, &mut r), 4, 2);
        let nu1 = 0.5 * factorial(q1) * f.norm_sq();
        let nu2 = 0.5 * factorial(q2) * h.norm_sq();
        let rep = cramer_split_check(&f, &h, nu1, nu2).unwrap();
        let (dx, dy) = rep.component_distances.unwrap();
        let (x, y) = (chaos(f), chaos(h));
        let total = criterion_distance(&x.add(&y).unwrap(), nu1 + nu2).unwrap();
        prop_assert!((total - dx - dy).abs() <= 1e-9 * total.max(1.0));
        prop_assert!((rep.distance - total).abs() <= 1e-12 * total.max(1.0));
    }

    #[test]
    fn char_fn_properties(nu in 0.1f64..10.0, lambda in -10.0f64..10.0) {
        let law = CenteredGammaLaw::new(nu).unwrap();
        let p = law.char_fn(lambda);
        prop_assert!(p.norm() <= 1.0 + 1e-15);
        prop_assert!((law.char_fn(-lambda) - p.conj()).norm() <= 1e-14);
        prop_assert_eq!(law.char_fn(0.0).re, 1.0);
    }

    #[test]
    fn incomplete_gamma_matches_independent_oracle(s in 0.05f64..30.0, x in 0.0f64..60.0) {
        let ours = regularized_lower_gamma(s, x);
        let theirs = statrs::function::gamma::gamma_lr(s, x);
        prop_assert!((ours - theirs).abs() <= 1e-12, "s={} x={} {} vs {}", s, x, ours, theirs);
        prop_assert!((ln_gamma(s) - statrs::function::gamma::ln_gamma(s)).abs() <= 1e-10 * ln_gamma(s).abs().max(1.0));
    }
}

#[test]
fn cdf_shape() {
    for nu in [0.5, 1.0, 2.0, 7.0] {
        let law = CenteredGammaLaw::new(nu).unwrap();
        assert_eq!(law.cdf(-nu - 1.0), 0.0);
        assert!(law.cdf(1e4) > 1.0 - 1e-12);
        let mut prev = 0.0;
        for i in 0..400 {
            let x = -nu + 0.1 * i as f64;
            let c = law.cdf(x);
            assert!(c >= prev);
            prev = c;
        }
    }
}

#[test]
fn cdf_matches_gamma_samples() {
    let n = 100_000;
    for (nu, seed) in [(1.0, 1u64), (2.0, 2), (5.0, 3)] {
        let law = CenteredGammaLaw::new(nu).unwrap();
        let g = Gamma::new(nu / 2.0, 1.0).unwrap();
        let mut r = rng(seed);
        let values = (0..n).map(|_| 2.0 * g.sample(&mut r) - nu).collect();
        let ks = ks_distance(&SampleBatch::new(values, seed), &law).unwrap();
        assert!(ks <= dkw_bound(n, 0.001), "nu={nu} ks={ks}");
    }
}

#[test]
fn inverse_cdf_samples_are_consistent() {
    let n = 100_000;
    let law = CenteredGammaLaw::new(3.0).unwrap();
    let mut r = rng(9);
    let values = (0..n).map(|_| law.quantile(r.gen::<f64>())).collect();
    let ks = ks_distance(&SampleBatch::new(values, 9), &law).unwrap();
    assert!(ks <= dkw_bound(n, 0.001), "{ks}");
}

#[test]
fn convolution_of_exact_builds() {
    let x = chaos(diag(5, &[0]));
    let y = chaos(diag(5, &[1, 2, 3, 4]));
    assert!(criterion_distance(&x, 1.0).unwrap() <= 1e-10);
    assert!(criterion_distance(&y, 4.0).unwrap() <= 1e-10);
    assert!(criterion_distance(&x.add(&y).unwrap(), 5.0).unwrap() <= 1e-10);
}

#[test]
fn law_moments_match_chaos_build() {
    let z = chaos(diag(2, &[0, 1]));
    let law = CenteredGammaLaw::new(2.0).unwrap();
    assert!((z.exact_moment(3).unwrap() - law.third_moment()).abs() < 1e-10);
    assert!((z.exact_moment(4).unwrap() - law.fourth_moment()).abs() < 1e-10);
    assert!((z.second_moment() - law.variance()).abs() < 1e-12);
}
