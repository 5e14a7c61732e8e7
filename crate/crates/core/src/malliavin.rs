//! Malliavin-type functionals of chaos elements.
//!
//! With `D_θ I_n(f) = n I_{n-1}(f(·, θ))` and `-D_θ L^{-1} I_m(h) = I_{m-1}(h(·, θ))`,
//! integrating the product formula over `θ` turns every pairing of
//! derivatives into a finite sum of symmetrized contractions:
//!
//! ```text
//! ∫ I_{n-1}(f(·,θ)) I_{m-1}(h(·,θ)) dθ
//!     = sum_{r=0}^{(n-1)∧(m-1)} r! C(n-1,r) C(m-1,r) I_{n+m-2-2r}(f ⊗~_{r+1} h)
//! ```
//!
//! `G_{X,Y} = <DX, -DL^{-1}Y>` weights each order pair by `n`, and `|DX|^2`
//! by `n m`. The derivative kernels `f(·, θ)` are never materialized.

use std::collections::BTreeMap;

use crate::chaos_algebra::ChaosElement;
use crate::combinatorics::{binomial, factorial};
use crate::error::{ChaosError, Result};
use crate::tensor_kernels::{KernelSum, SymmetricKernel};
use crate::DEFAULT_MAX_ORDER;

/// Relative tolerance used to call a contraction defect zero.
pub const INDEPENDENCE_RELATIVE_TOLERANCE: f64 = 1e-10;

fn check_centered(x: &ChaosElement) -> Result<()> {
    if x.is_centered() {
        Ok(())
    } else {
        Err(ChaosError::NotCentered {
            constant: x.expectation(),
        })
    }
}

fn derivative_pairing<W>(x: &ChaosElement, y: &ChaosElement, weight: W, max_order: usize) -> Result<ChaosElement>
where
    W: Fn(usize, usize) -> f64,
{
    check_centered(x)?;
    check_centered(y)?;
    if x.dim() != y.dim() {
        return Err(ChaosError::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    for f in x.kernels() {
        for h in y.kernels() {
            let top = f.order() + h.order() - 2;
            if top > max_order {
                return Err(ChaosError::OrderOverflow {
                    order: top,
                    max: max_order,
                    context: Some(format!("derivative pairing of orders {} and {}", f.order(), h.order())),
                });
            }
        }
    }

    let d = x.dim();
    let mut constant = 0.0;
    let mut sums: BTreeMap<usize, KernelSum> = BTreeMap::new();
    for f in x.kernels() {
        let n = f.order();
        for h in y.kernels() {
            let m = h.order();
            let w = weight(n, m);
            for r in 0..n.min(m) {
                let coef = w * factorial(r) * binomial(n - 1, r) * binomial(m - 1, r);
                if n == m && r == n - 1 {
                    constant += coef * f.inner_product(h)?;
                } else {
                    let k = f.contract_sym(h, r + 1)?;
                    sums.entry(k.order())
                        .or_insert_with(|| KernelSum::new(d, k.order()))
                        .add_scaled(&k, coef);
                }
            }
        }
    }
    ChaosElement::from_parts(d, constant, sums.into_values().map(KernelSum::finish))
}

/// `G_{X,Y} = <DX, -DL^{-1}Y>` with the default order bound.
pub fn gamma_inner(x: &ChaosElement, y: &ChaosElement) -> Result<ChaosElement> {
    gamma_inner_within(x, y, DEFAULT_MAX_ORDER)
}

/// `G_{X,Y} = <DX, -DL^{-1}Y>` for centered `X`, `Y`. Its expectation is
/// `Cov(X, Y)`.
pub fn gamma_inner_within(x: &ChaosElement, y: &ChaosElement, max_order: usize) -> Result<ChaosElement> {
    derivative_pairing(x, y, |n, _| n as f64, max_order)
}

pub fn grad_norm_sq(x: &ChaosElement) -> Result<ChaosElement> {
    grad_norm_sq_within(x, DEFAULT_MAX_ORDER)
}

/// `|DX|^2_{L^2(T)}` for centered `X`. Pointwise this is the squared
/// Euclidean gradient of `X` as a polynomial in `(W(e_1), ..., W(e_d))`.
pub fn grad_norm_sq_within(x: &ChaosElement, max_order: usize) -> Result<ChaosElement> {
    derivative_pairing(x, x, |n, m| (n * m) as f64, max_order)
}

/// `|f ⊗_1 h|`, the norm of the unsymmetrized first contraction.
///
/// `I_{q1}(f)` and `I_{q2}(h)` are independent iff this vanishes. The norm
/// is computed as `sqrt(<f ⊗_{q1-1} f, h ⊗_{q2-1} h>)`, a pairing of two
/// `d x d` matrices, which avoids building the order `q1+q2-2` tensor.
pub fn independence_defect(f: &SymmetricKernel, h: &SymmetricKernel) -> Result<f64> {
    if f.dim() != h.dim() {
        return Err(ChaosError::DimensionMismatch {
            left: f.dim(),
            right: h.dim(),
        });
    }
    if f.order() == 0 || h.order() == 0 {
        return Err(ChaosError::InvalidParameter(
            "independence is defined for kernels of order >= 1".into(),
        ));
    }
    let gf = f.contract_sym(f, f.order() - 1)?;
    let gh = h.contract_sym(h, h.order() - 1)?;
    Ok(gf.inner_product(&gh)?.max(0.0).sqrt())
}

/// Whether `defect` counts as zero for kernels of these norms.
pub fn is_independent(defect: f64, f: &SymmetricKernel, h: &SymmetricKernel) -> bool {
    defect <= INDEPENDENCE_RELATIVE_TOLERANCE * f.norm() * h.norm()
}

/// Largest [`independence_defect`] over every pair of chaos components.
/// Zero certifies strong independence.
pub fn strong_independence_defect(x: &ChaosElement, y: &ChaosElement) -> Result<f64> {
    let mut worst = 0.0f64;
    for f in x.kernels() {
        for h in y.kernels() {
            worst = worst.max(independence_defect(f, h)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(d: usize, idx: &[usize]) -> SymmetricKernel {
        SymmetricKernel::basis(d, idx).unwrap()
    }

    fn i(k: SymmetricKernel) -> ChaosElement {
        ChaosElement::from_kernel(k).unwrap()
    }

    fn gamma2() -> ChaosElement {
        i(e(2, &[0, 0]).add(&e(2, &[1, 1])).unwrap())
    }

    fn assert_close(a: &ChaosElement, b: &ChaosElement) {
        let diff = a.sub(b).unwrap();
        assert!(diff.second_moment() < 1e-24, "{a:?} vs {b:?}");
    }

    #[test]
    fn gamma_inner_of_exact_gamma() {
        let x = gamma2();
        let g = gamma_inner(&x, &x).unwrap();
        assert_close(&g, &x.scale(2.0).shift(4.0));
    }

    #[test]
    fn gamma_inner_first_chaos() {
        let x = i(e(3, &[0]));
        assert_eq!(gamma_inner(&x, &x).unwrap(), ChaosElement::constant(3, 1.0));
        assert_eq!(grad_norm_sq(&x).unwrap(), ChaosElement::constant(3, 1.0));
    }

    #[test]
    fn disjoint_supports_pair_to_zero() {
        let x = i(e(5, &[0, 0]).add(&e(5, &[0, 1])).unwrap()).add(&i(e(5, &[1]))).unwrap();
        let y = i(e(5, &[2, 3, 4])).add(&i(e(5, &[3, 3]))).unwrap();
        assert_eq!(gamma_inner(&x, &y).unwrap(), ChaosElement::zero(5));
        assert_eq!(gamma_inner(&y, &x).unwrap(), ChaosElement::zero(5));
    }

    #[test]
    fn grad_norm_of_exact_gamma() {
        let x = gamma2();
        assert_close(&grad_norm_sq(&x).unwrap(), &x.scale(4.0).shift(8.0));
    }

    #[test]
    fn rejects_uncentered_input() {
        let x = gamma2().shift(1.0);
        assert!(matches!(
            gamma_inner(&x, &gamma2()),
            Err(ChaosError::NotCentered { .. })
        ));
        assert!(grad_norm_sq(&x).is_err());
    }

    #[test]
    fn independence_examples() {
        assert_eq!(independence_defect(&e(3, &[0, 0]), &e(3, &[1, 1])).unwrap(), 0.0);
        assert!((independence_defect(&e(3, &[0, 0]), &e(3, &[0, 0])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(independence_defect(&e(3, &[0, 1]), &e(3, &[2, 2])).unwrap(), 0.0);
        assert!(independence_defect(&e(3, &[0]), &e(2, &[0])).is_err());
    }

    #[test]
    fn defect_matches_raw_contraction() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for q1 in 1..=3 {
            for q2 in 1..=3 {
                let f = SymmetricKernel::random(3, q1, &mut rng);
                let h = SymmetricKernel::random(3, q2, &mut rng);
                let raw = f.contract(&h, 1).unwrap().norm();
                let fast = independence_defect(&f, &h).unwrap();
                assert!((raw - fast).abs() < 1e-10 * (1.0 + raw));
            }
        }
    }

    #[test]
    fn strong_independence_examples() {
        let x = i(e(3, &[0, 0]));
        assert!((strong_independence_defect(&x, &x).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(strong_independence_defect(&x, &ChaosElement::zero(3)).unwrap(), 0.0);
    }
}
