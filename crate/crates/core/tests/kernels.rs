mod common;

use chaoscalc::tensor_kernels::{basis_kernel, canonical_indices, symmetrize};
use chaoscalc::{RawTensor, SymmetricKernel};
use common::{all_tuples, dense_contraction, dense_norm_sq, rng};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn kernel_strategy(max_d: usize, max_q: usize) -> impl Strategy<Value = SymmetricKernel> {
    (1..=max_d, 1..=max_q, any::<u64>()).prop_map(|(d, q, seed)| SymmetricKernel::random(d, q, &mut rng(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lookups_are_permutation_invariant(f in kernel_strategy(4, 4), seed in any::<u64>()) {
        let mut r = rng(seed);
        let tuples = all_tuples(f.dim(), f.order());
        for _ in 0..10 {
            let t = tuples.choose(&mut r).unwrap();
            let mut s = t.clone();
            s.shuffle(&mut r);
            prop_assert_eq!(f.get(t).unwrap(), f.get(&s).unwrap());
        }
    }

    #[test]
    fn symmetrize_is_idempotent(d in 1usize..=3, q in 1usize..=4, seed in any::<u64>()) {
        let mut r = rng(seed);
        let raw = RawTensor::from_values(
            d,
            q,
            all_tuples(d, q).into_iter().map(|t| (t, rand::Rng::gen_range(&mut r, -1.0..1.0))),
        ).unwrap();
        let once = symmetrize(&raw).unwrap();
        let twice = symmetrize(&once.to_raw().unwrap()).unwrap();
        for (m, v) in once.iter() {
            let w = twice.get(&m.entries().iter().map(|&i| i as usize).collect::<Vec<_>>()).unwrap();
            prop_assert!((v - w).abs() <= 1e-15 * v.abs().max(1.0));
        }
        prop_assert_eq!(once.len(), twice.len());
    }

    #[test]
    fn contraction_cauchy_schwarz(f in kernel_strategy(4, 4), seed in any::<u64>(), r_pick in any::<usize>()) {
        let mut rr = rng(seed);
        let n = 1 + r_pick % 4;
        let g = SymmetricKernel::random(f.dim(), n, &mut rr);
        let r = r_pick % (f.order().min(n) + 1);
        let c = f.contract(&g, r).unwrap();
        prop_assert!(c.norm() <= f.norm() * g.norm() + 1e-12);
        let cs = f.contract_sym(&g, r).unwrap();
        prop_assert!(cs.norm() <= c.norm() + 1e-12);
    }

    #[test]
    fn full_contraction_is_norm(f in kernel_strategy(4, 4)) {
        let c = f.contract(&f, f.order()).unwrap();
        prop_assert!((c.scalar_value().unwrap() - f.norm_sq()).abs() <= 1e-12 * f.norm_sq().max(1.0));
        let s = f.contract_sym(&f, f.order()).unwrap();
        prop_assert!((s.scalar_value().unwrap() - f.norm_sq()).abs() <= 1e-12 * f.norm_sq().max(1.0));
    }

    #[test]
    fn canonical_norm_matches_dense(f in kernel_strategy(3, 4)) {
        prop_assert!((f.norm_sq() - dense_norm_sq(&f)).abs() <= 1e-12 * f.norm_sq().max(1.0));
    }

    #[test]
    fn contraction_matches_dense_oracle(f in kernel_strategy(3, 3), seed in any::<u64>(), r_pick in any::<usize>()) {
        let g = SymmetricKernel::random(f.dim(), 1 + r_pick % 3, &mut rng(seed));
        let r = r_pick % (f.order().min(g.order()) + 1);
        let raw = f.contract(&g, r).unwrap();
        let dense = dense_contraction(&f, &g, r);
        for (t, v) in &dense {
            prop_assert!((raw.get(t).unwrap() - v).abs() <= 1e-12 * v.abs().max(1.0));
        }
        let sym = f.contract_sym(&g, r).unwrap();
        let via_raw = symmetrize(&raw).unwrap();
        prop_assert!(sym.sub(&via_raw).unwrap().norm() <= 1e-12 * sym.norm().max(1.0));
    }

    #[test]
    fn inner_product_is_bilinear_and_symmetric(f in kernel_strategy(3, 3), seed in any::<u64>(), a in -3.0f64..3.0) {
        let g = SymmetricKernel::random(f.dim(), f.order(), &mut rng(seed));
        let fg = f.inner_product(&g).unwrap();
        prop_assert!((fg - g.inner_product(&f).unwrap()).abs() <= 1e-12 * fg.abs().max(1.0));
        let lhs = f.scale(a).add(&g).unwrap().inner_product(&g).unwrap();
        let rhs = a * fg + g.norm_sq();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0));
    }
}

#[test]
fn basis_kernels_have_unit_tensor_entries() {
    let e = basis_kernel(3, &[0, 1, 1]).unwrap();
    assert_eq!(e.get(&[1, 0, 1]).unwrap(), 1.0 / 3.0);
    assert!((dense_norm_sq(&e) - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(canonical_indices(3, 3).count(), 10);
}

#[test]
fn zero_kernels_flow_through_operations() {
    let z = SymmetricKernel::zero(3, 4);
    let f = SymmetricKernel::random(3, 2, &mut rng(1));
    assert!(z.contract_sym(&f, 2).unwrap().is_zero());
    assert_eq!(z.norm_sq(), 0.0);
    assert!(z.add(&z).unwrap().is_zero());
    assert!(symmetrize(&z.to_raw().unwrap()).unwrap().is_zero());
}

#[test]
fn text_round_trip() {
    let f = SymmetricKernel::random(3, 3, &mut rng(2));
    let back: SymmetricKernel = f.to_string().parse().unwrap();
    assert_eq!(back, f);
}
