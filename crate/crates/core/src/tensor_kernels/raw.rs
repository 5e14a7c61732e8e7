use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Accum, MultiIndex, SymmetricKernel};
use crate::error::{ChaosError, Result};
use crate::DEFAULT_MAX_ORDER;

/// A tensor with no symmetry assumed, keyed by ordered tuples.
///
/// Only produced as the output of [`SymmetricKernel::contract`] and as
/// test input for symmetrization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTensor {
    dim: usize,
    order: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl RawTensor {
    pub fn zero(dim: usize, order: usize) -> Self {
        Self {
            dim,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_values<I>(dim: usize, order: usize, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut t = Self::zero(dim, order);
        for (idx, v) in values {
            if idx.len() != order {
                return Err(ChaosError::OrderMismatch {
                    left: order,
                    right: idx.len(),
                });
            }
            let m = MultiIndex::ordered(&idx, dim)?;
            if v == 0.0 {
                t.coeffs.remove(&m);
            } else {
                t.coeffs.insert(m, v);
            }
        }
        Ok(t)
    }

    pub(crate) fn from_map(dim: usize, order: usize, coeffs: BTreeMap<MultiIndex, f64>) -> Self {
        Self { dim, order, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (k, *v))
    }

    pub fn get(&self, tuple: &[usize]) -> Result<f64> {
        let m = MultiIndex::ordered(tuple, self.dim)?;
        Ok(self.coeffs.get(&m).copied().unwrap_or(0.0))
    }

    pub fn scalar_value(&self) -> Option<f64> {
        (self.order == 0).then(|| self.coeffs.values().next().copied().unwrap_or(0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.values().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Symmetrization with the default order bound.
    pub fn symmetrize(&self) -> Result<SymmetricKernel> {
        self.symmetrize_within(DEFAULT_MAX_ORDER)
    }

    /// `f~(x) = (1/q!) sum_σ f(x_σ)`: the value at a canonical index is the
    /// mean of the tensor over all tuples that sort to it.
    pub fn symmetrize_within(&self, max_order: usize) -> Result<SymmetricKernel> {
        if self.order > max_order {
            return Err(ChaosError::OrderOverflow {
                order: self.order,
                max: max_order,
                context: Some("symmetrize".into()),
            });
        }
        let mut acc: BTreeMap<MultiIndex, Accum> = BTreeMap::new();
        for (m, v) in &self.coeffs {
            acc.entry(m.to_canonical()).or_default().add(*v);
        }
        let coeffs = acc
            .into_iter()
            .filter_map(|(m, a)| {
                let mult = m.multiplicity();
                a.value().map(|s| (m, s / mult))
            })
            .collect();
        Ok(SymmetricKernel::from_map(self.dim, self.order, coeffs))
    }
}
