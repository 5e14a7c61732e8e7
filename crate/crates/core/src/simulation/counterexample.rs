//! The sum of two independent variables that is centered Gamma although one
//! summand is not: `X = A - 1`, `Y = 2ϖB - 1` with `A, B ~ Exp(1)` and
//! `ϖ ~ Bernoulli(1/2)`.
//!
//! In chaos form on `d = 5` directions, `A = (W(e_0)^2 + W(e_1)^2) / 2`,
//! `B = (W(e_3)^2 + W(e_4)^2) / 2` and `2ϖ - 1 = sign(W(e_2))`, expanded as
//! `sum_k b_{2k+1} I_{2k+1}(e_2^{⊗(2k+1)})`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use super::{substream, SampleBatch};
use crate::chaos_algebra::ChaosElement;
use crate::combinatorics::factorial;
use crate::error::{ChaosError, Result};
use crate::hermite::hermite_table;
use crate::par::{map_range, Execution};
use crate::tensor_kernels::SymmetricKernel;

pub const COUNTEREXAMPLE_DIM: usize = 5;

/// Coefficients of `sign(x) = sum_k b_{2k+1} He_{2k+1}(x)`, truncated at `k <= K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignExpansionCoeffs {
    pub k: usize,
    pub b: Vec<f64>,
}

impl SignExpansionCoeffs {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            b: (0..=k).map(Self::coefficient).collect(),
        }
    }

    /// `b_{2k+1} = 2 (-1)^k / ((2k+1) sqrt(2π) k! 2^k)`.
    pub fn coefficient(k: usize) -> f64 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        2.0 * sign / ((2 * k + 1) as f64 * (2.0 * PI).sqrt() * factorial(k) * 2f64.powi(k as i32))
    }

    pub fn partial_sum(&self, x: f64) -> f64 {
        let he = hermite_table(x, 2 * self.k + 1);
        self.b.iter().enumerate().map(|(k, b)| b * he[2 * k + 1]).sum()
    }

    /// `sum_k b_{2k+1}^2 (2k+1)!`, the variance of the truncated sign.
    pub fn variance(&self) -> f64 {
        self.b
            .iter()
            .enumerate()
            .map(|(k, b)| b * b * factorial(2 * k + 1))
            .sum()
    }
}

fn diag_kernel(indices: &[usize], weight: f64) -> Result<SymmetricKernel> {
    let mut acc = SymmetricKernel::zero(COUNTEREXAMPLE_DIM, 2);
    for &i in indices {
        acc = acc.add(&SymmetricKernel::basis(COUNTEREXAMPLE_DIM, &[i, i])?.scale(weight))?;
    }
    Ok(acc)
}

/// Truncated `sign(W(e_2))` as a chaos element on five directions.
pub fn sign_element(coeffs: &SignExpansionCoeffs) -> Result<ChaosElement> {
    let kernels = coeffs
        .b
        .iter()
        .enumerate()
        .map(|(k, &b)| Ok(SymmetricKernel::basis(COUNTEREXAMPLE_DIM, &vec![2; 2 * k + 1])?.scale(b)))
        .collect::<Result<Vec<_>>>()?;
    ChaosElement::from_parts(COUNTEREXAMPLE_DIM, 0.0, kernels)
}

/// Truncated `ϖ = (1 + sign(W(e_2))) / 2`.
pub fn bernoulli_element(coeffs: &SignExpansionCoeffs) -> Result<ChaosElement> {
    Ok(sign_element(coeffs)?.scale(0.5).shift(0.5))
}

/// `(X, Y)` in chaos form with the sign expansion truncated at `k <= K`.
///
/// `Y = B' + S + S B'` where `B' = B - 1` and `S` is the truncated sign;
/// the product is expanded with the product formula, bounded by `max_order`.
pub fn counterexample_chaos(k: usize, max_order: usize) -> Result<(ChaosElement, ChaosElement)> {
    let top = 2 * k + 3;
    if top > max_order {
        return Err(ChaosError::OrderOverflow {
            order: top,
            max: max_order,
            context: Some(format!("sign expansion truncated at K = {k}")),
        });
    }
    let x = ChaosElement::from_kernel(diag_kernel(&[0, 1], 0.5)?)?;
    let b = ChaosElement::from_kernel(diag_kernel(&[3, 4], 0.5)?)?;
    let s = sign_element(&SignExpansionCoeffs::new(k))?;
    let y = b.add(&s)?.add(&s.multiply_within(&b, max_order)?)?;
    Ok((x, y))
}

/// Paired draws of `X`, `Y` and `Z = X + Y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleBatches {
    pub x: SampleBatch,
    pub y: SampleBatch,
    pub z: SampleBatch,
}

fn exponential<R: Rng>(rng: &mut R) -> f64 {
    -(1.0 - rng.gen::<f64>()).ln()
}

fn split(seed: u64, triples: Vec<(f64, f64)>) -> CounterexampleBatches {
    let (x, y): (Vec<f64>, Vec<f64>) = triples.into_iter().unzip();
    let z = x.iter().zip(&y).map(|(a, b)| a + b).collect();
    CounterexampleBatches {
        x: SampleBatch::new(x, seed),
        y: SampleBatch::new(y, seed),
        z: SampleBatch::new(z, seed),
    }
}

/// Direct sampler: `A, B` by inverse CDF and `ϖ` by thresholding, all from
/// the substream of each index.
pub fn counterexample_direct(n: usize, seed: u64, exec: Execution) -> Result<CounterexampleBatches> {
    if n == 0 {
        return Err(ChaosError::InvalidParameter("sample size must be >= 1".into()));
    }
    let pairs = map_range(n, exec, |i| {
        let mut rng = substream(seed, i as u64);
        let a = exponential(&mut rng);
        let b = exponential(&mut rng);
        let w = if rng.gen::<f64>() < 0.5 { 1.0 } else { 0.0 };
        (a - 1.0, 2.0 * w * b - 1.0)
    });
    Ok(split(seed, pairs))
}

/// Shifted analogue with `A ~ Γ(a, λ)`, `B ~ Γ(b, λ)` (shape, rate):
/// `X = A - E(A)`, `Y = 2ϖB - E(2ϖB)`. For `a = b = 1`, `λ = 1` this is the
/// exponential sampler in law. No chaos representation is provided.
pub fn shifted_gamma_direct(
    shape_a: f64,
    shape_b: f64,
    rate: f64,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<CounterexampleBatches> {
    if n == 0 {
        return Err(ChaosError::InvalidParameter("sample size must be >= 1".into()));
    }
    let ga = Gamma::new(shape_a, 1.0 / rate).map_err(|e| ChaosError::InvalidParameter(e.to_string()))?;
    let gb = Gamma::new(shape_b, 1.0 / rate).map_err(|e| ChaosError::InvalidParameter(e.to_string()))?;
    let (ma, mb) = (shape_a / rate, shape_b / rate);
    let pairs = map_range(n, exec, |i| {
        let mut rng = substream(seed, i as u64);
        let a = ga.sample(&mut rng);
        let b = gb.sample(&mut rng);
        let w = if rng.gen::<f64>() < 0.5 { 1.0 } else { 0.0 };
        (a - ma, 2.0 * w * b - mb)
    });
    Ok(split(seed, pairs))
}
