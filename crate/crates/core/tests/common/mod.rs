#![allow(dead_code)]

use chaoscalc::{ChaosElement, SymmetricKernel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every tuple in `{0..d}^q`, in lexicographic order.
pub fn all_tuples(d: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..q {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..d).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn dense_norm_sq(f: &SymmetricKernel) -> f64 {
    all_tuples(f.dim(), f.order())
        .iter()
        .map(|t| f.get(t).unwrap().powi(2))
        .sum()
}

/// `(f ⊗_r g)(a, b) = sum_c f(a, c) g(b, c)` by brute force.
pub fn dense_contraction(f: &SymmetricKernel, g: &SymmetricKernel, r: usize) -> Vec<(Vec<usize>, f64)> {
    let d = f.dim();
    let (m, n) = (f.order(), g.order());
    let cs = all_tuples(d, r);
    let mut out = Vec::new();
    for a in all_tuples(d, m - r) {
        for b in all_tuples(d, n - r) {
            let mut s = 0.0;
            for c in &cs {
                let fa: Vec<usize> = a.iter().chain(c).copied().collect();
                let gb: Vec<usize> = b.iter().chain(c).copied().collect();
                s += f.get(&fa).unwrap() * g.get(&gb).unwrap();
            }
            out.push((a.iter().chain(&b).copied().collect(), s));
        }
    }
    out
}

pub fn diag(d: usize, indices: &[usize]) -> SymmetricKernel {
    indices.iter().fold(SymmetricKernel::zero(d, 2), |acc, &i| {
        acc.add(&SymmetricKernel::basis(d, &[i, i]).unwrap()).unwrap()
    })
}

pub fn chaos(f: SymmetricKernel) -> ChaosElement {
    ChaosElement::from_kernel(f).unwrap()
}

pub fn random_element(d: usize, orders: &[usize], constant: f64, rng: &mut ChaCha8Rng) -> ChaosElement {
    let kernels: Vec<_> = orders.iter().map(|&q| SymmetricKernel::random(d, q, rng)).collect();
    ChaosElement::from_parts(d, constant, kernels).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
