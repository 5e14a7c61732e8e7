use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chaos_algebra::ChaosElement;
use crate::combinatorics::{binomial, factorial};
use crate::error::{ChaosError, Result};
use crate::malliavin::{gamma_inner_within, grad_norm_sq_within, independence_defect, is_independent};
use crate::par::{map_range, Execution};
use crate::tensor_kernels::SymmetricKernel;
use crate::DEFAULT_MAX_ORDER;

/// Distances at or below this are reported as exact zeros.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// Tolerance on `q! |f|^2 = 2ν`.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Gamma,
    NotGamma,
}

impl Verdict {
    pub fn from_distance(distance: f64, tolerance: f64) -> Self {
        if distance <= tolerance {
            Verdict::Gamma
        } else {
            Verdict::NotGamma
        }
    }
}

/// Outcome of a Gamma criterion evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub nu: f64,
    /// `E[(2ν + 2Z - G_Z)^2]`.
    pub distance: f64,
    /// Per-summand distances `(X against ν1, Y against ν2)` for split checks.
    pub component_distances: Option<(f64, f64)>,
    pub decomposition_terms: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub tolerance: f64,
}

fn max_order_for(x: &ChaosElement) -> usize {
    DEFAULT_MAX_ORDER.max(2 * x.max_order().saturating_sub(1))
}

/// `E[(2ν + 2Z - G_Z)^2]` with the default order bound.
pub fn criterion_distance(z: &ChaosElement, nu: f64) -> Result<f64> {
    criterion_distance_within(z, nu, DEFAULT_MAX_ORDER)
}

/// Builds `2ν + 2Z - <DZ, -DL^{-1}Z>` as a chaos element and returns its
/// exact second moment.
pub fn criterion_distance_within(z: &ChaosElement, nu: f64, max_order: usize) -> Result<f64> {
    let g = gamma_inner_within(z, z, max_order)?;
    let w = z.scale(2.0).sub(&g)?.shift(2.0 * nu);
    Ok(w.second_moment())
}

/// `E[(|DX|^2 - 2qX - 2qν)^2]` for `X = I_q(f)`, built from `|DX|^2`
/// directly. Equals `q^2` times [`criterion_distance`] of `X`.
pub fn chaos_criterion_distance(f: &SymmetricKernel, nu: f64) -> Result<f64> {
    let q = f.order();
    if q == 0 {
        return Err(ChaosError::InvalidParameter("kernel order must be >= 1".into()));
    }
    let x = ChaosElement::from_kernel(f.clone())?;
    let grad = grad_norm_sq_within(&x, max_order_for(&x))?;
    let qf = q as f64;
    let w = grad.sub(&x.scale(2.0 * qf))?.shift(-2.0 * qf * nu);
    Ok(w.second_moment())
}

/// A closed-form moment value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFormula {
    pub value: f64,
    /// Set when the order is odd, where the third moment is zero by the
    /// symmetry `I_q(f) -> -I_q(f)` of the Gaussian law and the even-order
    /// closed form does not apply.
    pub odd_order: bool,
}

/// `E(I_q(f)^3) = q! (q/2)! C(q, q/2)^2 <f, f ⊗~_{q/2} f>` for even `q`.
pub fn third_moment_formula(f: &SymmetricKernel) -> Result<MomentFormula> {
    let q = f.order();
    if q % 2 == 1 {
        return Ok(MomentFormula {
            value: 0.0,
            odd_order: true,
        });
    }
    if q == 0 {
        return Err(ChaosError::InvalidParameter("kernel order must be >= 1".into()));
    }
    let h = q / 2;
    let c = f.contract_sym(f, h)?;
    let value = factorial(q) * factorial(h) * binomial(q, h).powi(2) * f.inner_product(&c)?;
    Ok(MomentFormula {
        value,
        odd_order: false,
    })
}

fn fourth_moment_weight(q: usize, p: usize) -> f64 {
    let qf = q as f64;
    3.0 / qf
        * qf
        * qf
        * factorial(p - 1)
        * binomial(q - 1, p - 1).powi(2)
        * factorial(p)
        * binomial(q, p).powi(2)
        * factorial(2 * q - 2 * p)
}

/// `E(I_q(f)^4) = 3 (q! |f|^2)^2
///   + (3/q) sum_{p=1}^{q-1} q^2 (p-1)! C(q-1,p-1)^2 p! C(q,p)^2 (2q-2p)! |f ⊗~_p f|^2`.
pub fn fourth_moment_formula(f: &SymmetricKernel) -> Result<f64> {
    let q = f.order();
    if q == 0 {
        return Err(ChaosError::InvalidParameter("kernel order must be >= 1".into()));
    }
    let var = factorial(q) * f.norm_sq();
    let mut total = 3.0 * var * var;
    for p in 1..q {
        total += fourth_moment_weight(q, p) * f.contract_sym(f, p)?.norm_sq();
    }
    Ok(total)
}

/// `c_q = 4 / ((q/2)! C(q, q/2)^2)`.
pub fn projection_constant(q: usize) -> f64 {
    let h = q / 2;
    4.0 / (factorial(h) * binomial(q, h).powi(2))
}

fn check_normalized(f: &SymmetricKernel, nu: f64, label: &str, failures: &mut Vec<String>) {
    let second = factorial(f.order()) * f.norm_sq();
    if !(nu > 0.0) {
        failures.push(format!("{label}: nu must be positive, got {nu}"));
    } else if (second - 2.0 * nu).abs() > NORMALIZATION_TOLERANCE * (2.0 * nu).max(1.0) {
        failures.push(format!(
            "{label}: second moment {second} differs from 2nu = {}",
            2.0 * nu
        ));
    }
}

fn check_even_order(f: &SymmetricKernel, label: &str, failures: &mut Vec<String>) {
    let q = f.order();
    if q < 2 || q % 2 == 1 {
        failures.push(format!("{label}: order {q} must be even and >= 2"));
    }
}

/// Non-negative pieces of `E(X^4) - 12 E(X^3) - (12ν^2 - 48ν)` for a
/// normalized `X = I_q(f)` with even `q`: one contraction term per
/// `p != q/2` and the projection defect
/// `(3/2) (q!)^5 / ((q/2)!)^6 |f ⊗~_{q/2} f - c_q f|^2`.
fn decomposition_terms(f: &SymmetricKernel, nu: f64) -> Result<BTreeMap<String, f64>> {
    let q = f.order();
    let h = q / 2;
    let mut terms = BTreeMap::new();
    let mut sum = 0.0;
    for p in (1..q).filter(|&p| p != h) {
        let v = fourth_moment_weight(q, p) * f.contract_sym(f, p)?.norm_sq();
        sum += v;
        terms.insert(format!("contraction_p{p}"), v);
    }
    let mid = f.contract_sym(f, h)?;
    let defect = mid.sub(&f.scale(projection_constant(q)))?.norm_sq();
    let coef = 1.5 * factorial(q).powi(5) / factorial(h).powi(6);
    let projection = coef * defect;
    sum += projection;
    terms.insert("projection_defect".into(), projection);
    terms.insert("sum".into(), sum);

    let lhs = fourth_moment_formula(f)? - 12.0 * third_moment_formula(f)?.value;
    let rhs = sum + 12.0 * nu * nu - 48.0 * nu;
    terms.insert("identity_residual".into(), lhs - rhs);
    Ok(terms)
}

/// Splits `E(Z^4) - 12 E(Z^3)` for `Z = I_q(f)`, `q` even, `q! |f|^2 = 2ν`,
/// into `12ν^2 - 48ν` plus named non-negative terms. All terms vanish
/// exactly when `Z ~ F(ν)`.
pub fn fourth_moment_decomposition(f: &SymmetricKernel, nu: f64) -> Result<CriterionReport> {
    let q = f.order();
    if q % 2 == 1 {
        return Err(ChaosError::OddOrder { order: q });
    }
    let mut failures = Vec::new();
    check_even_order(f, "f", &mut failures);
    check_normalized(f, nu, "f", &mut failures);
    if !failures.is_empty() {
        return Err(ChaosError::Precondition(failures));
    }
    let x = ChaosElement::from_kernel(f.clone())?;
    let distance = criterion_distance_within(&x, nu, max_order_for(&x))?;
    Ok(CriterionReport {
        nu,
        distance,
        component_distances: None,
        decomposition_terms: decomposition_terms(f, nu)?,
        verdict: Verdict::from_distance(distance, ZERO_TOLERANCE),
        tolerance: ZERO_TOLERANCE,
    })
}

/// Checks the Cramér split `Z = I_{q1}(f) + I_{q2}(h)` against `F(ν1 + ν2)`.
///
/// Requires even orders `>= 2`, independent kernels and
/// `q1! |f|^2 = 2ν1`, `q2! |h|^2 = 2ν2`; every violated precondition is
/// listed in the error. The report holds the total distance, the component
/// distances for `X` against `ν1` and `Y` against `ν2`, the fourth-moment
/// decomposition of each component (prefixed `x.` and `y.`), and
/// `additive_residual = total - dist(X) - dist(Y)`, which is zero in exact
/// arithmetic under these hypotheses.
pub fn cramer_split_check(f: &SymmetricKernel, h: &SymmetricKernel, nu1: f64, nu2: f64) -> Result<CriterionReport> {
    let mut failures = Vec::new();
    if f.dim() != h.dim() {
        return Err(ChaosError::DimensionMismatch {
            left: f.dim(),
            right: h.dim(),
        });
    }
    check_even_order(f, "f", &mut failures);
    check_even_order(h, "h", &mut failures);
    check_normalized(f, nu1, "f", &mut failures);
    check_normalized(h, nu2, "h", &mut failures);
    if f.order() >= 1 && h.order() >= 1 {
        let defect = independence_defect(f, h)?;
        if !is_independent(defect, f, h) {
            failures.push(format!("f and h are not independent: |f ⊗_1 h| = {defect:e}"));
        }
    }
    if !failures.is_empty() {
        return Err(ChaosError::Precondition(failures));
    }

    let x = ChaosElement::from_kernel(f.clone())?;
    let y = ChaosElement::from_kernel(h.clone())?;
    let z = x.add(&y)?;
    let max = max_order_for(&z);
    let nu = nu1 + nu2;
    let total = criterion_distance_within(&z, nu, max)?;
    let dx = criterion_distance_within(&x, nu1, max)?;
    let dy = criterion_distance_within(&y, nu2, max)?;

    let mut terms = BTreeMap::new();
    for (prefix, k, v) in [("x", f, nu1), ("y", h, nu2)] {
        for (name, value) in decomposition_terms(k, v)? {
            terms.insert(format!("{prefix}.{name}"), value);
        }
    }
    terms.insert("additive_residual".into(), total - dx - dy);

    Ok(CriterionReport {
        nu,
        distance: total,
        component_distances: Some((dx, dy)),
        decomposition_terms: terms,
        verdict: Verdict::from_distance(total, ZERO_TOLERANCE),
        tolerance: ZERO_TOLERANCE,
    })
}

/// Evaluates the Gamma criterion along a sequence `Z_k = I(f_k) + I(h_k)`
/// for fixed targets `ν1`, `ν2`.
///
/// Each report holds the total distance against `F(ν1 + ν2)`, the component
/// distances, and the second moments of both summands together with their
/// gaps to `2ν1`, `2ν2`. Pairs must be independent; the first violation is
/// reported with its one-based position.
pub fn asymptotic_criterion(
    seq: &[(SymmetricKernel, SymmetricKernel)],
    nu1: f64,
    nu2: f64,
    exec: Execution,
) -> Result<Vec<CriterionReport>> {
    if !(nu1 > 0.0 && nu2 > 0.0) {
        return Err(ChaosError::InvalidParameter("nu1 and nu2 must be positive".into()));
    }
    for (k, (f, h)) in seq.iter().enumerate() {
        let defect = independence_defect(f, h)?;
        if !is_independent(defect, f, h) {
            return Err(ChaosError::NotIndependent {
                defect,
                tolerance: crate::malliavin::INDEPENDENCE_RELATIVE_TOLERANCE * f.norm() * h.norm(),
                step: Some(k + 1),
            });
        }
    }
    let nu = nu1 + nu2;
    map_range(seq.len(), exec, |k| -> Result<CriterionReport> {
        let (f, h) = &seq[k];
        let x = ChaosElement::from_kernel(f.clone())?;
        let y = ChaosElement::from_kernel(h.clone())?;
        let z = x.add(&y)?;
        let max = max_order_for(&z);
        let total = criterion_distance_within(&z, nu, max)?;
        let dx = criterion_distance_within(&x, nu1, max)?;
        let dy = criterion_distance_within(&y, nu2, max)?;
        let mut terms = BTreeMap::new();
        terms.insert("x.second_moment".into(), x.second_moment());
        terms.insert("y.second_moment".into(), y.second_moment());
        terms.insert("x.second_moment_gap".into(), x.second_moment() - 2.0 * nu1);
        terms.insert("y.second_moment_gap".into(), y.second_moment() - 2.0 * nu2);
        Ok(CriterionReport {
            nu,
            distance: total,
            component_distances: Some((dx, dy)),
            decomposition_terms: terms,
            verdict: Verdict::from_distance(total, ZERO_TOLERANCE),
            tolerance: ZERO_TOLERANCE,
        })
    })
    .into_iter()
    .collect()
}
