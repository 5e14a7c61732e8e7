//! Symmetric coefficient tensors standing in for symmetric kernels in
//! `L^2(T^q)` once `T` is truncated to `d` orthonormal directions.
//!
//! A kernel of order `q` is stored only on canonical (sorted) multi-indices;
//! the full tensor value at any tuple is the value at its sorted form, so
//! symmetry holds exactly. Sums over all `d^q` tuples are computed as sums
//! over canonical indices weighted by their multiplicity.

mod multi_index;
mod raw;
mod text;

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{counts_factorial, factorial};
use crate::error::{ChaosError, Result};

pub use multi_index::MultiIndex;
pub use raw::RawTensor;
pub(crate) use text::parse_kernel_block;

/// Entries whose magnitude falls below this fraction of the summed
/// magnitudes that produced them are treated as cancellation noise and dropped.
pub(crate) const PRUNE_RELATIVE: f64 = 1e-14;

/// Upper bound on the number of tuples materialized by dense or raw expansions.
pub const EXPANSION_LIMIT: u128 = 1 << 22;

/// Running sum that remembers the magnitude of what went into it.
#[derive(Clone, Copy, Default)]
pub(crate) struct Accum {
    sum: f64,
    mass: f64,
}

impl Accum {
    pub(crate) fn add(&mut self, v: f64) {
        self.sum += v;
        self.mass += v.abs();
    }

    pub(crate) fn value(self) -> Option<f64> {
        if self.sum == 0.0 || self.sum.abs() <= PRUNE_RELATIVE * self.mass {
            None
        } else {
            Some(self.sum)
        }
    }
}

/// Symmetric kernel of order `q` over a `d`-dimensional basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricKernel {
    dim: usize,
    order: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl SymmetricKernel {
    pub fn zero(dim: usize, order: usize) -> Self {
        Self {
            dim,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    /// The order-0 kernel holding a single number.
    pub fn scalar(dim: usize, value: f64) -> Self {
        let mut k = Self::zero(dim, 0);
        if value != 0.0 {
            k.coeffs.insert(MultiIndex::default(), value);
        }
        k
    }

    /// The symmetrization of `e_{i_1} ⊗ ... ⊗ e_{i_q}`.
    ///
    /// Every tuple that sorts to the same canonical index carries
    /// `1 / multiplicity`, so `basis(d, &[i; q])` has unit norm and
    /// `basis(d, &[0, 1])` has squared norm one half.
    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        let idx = MultiIndex::canonical(indices, dim)?;
        let value = 1.0 / idx.multiplicity();
        let mut k = Self::zero(dim, indices.len());
        k.coeffs.insert(idx, value);
        Ok(k)
    }

    /// Builds a kernel from `(tuple, value)` pairs. Tuples are sorted before
    /// storage; a later pair for the same canonical index overwrites an
    /// earlier one.
    pub fn from_values<I>(dim: usize, order: usize, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let mut k = Self::zero(dim, order);
        for (idx, v) in values {
            if idx.len() != order {
                return Err(ChaosError::OrderMismatch {
                    left: order,
                    right: idx.len(),
                });
            }
            let m = MultiIndex::canonical(&idx, dim)?;
            if v == 0.0 {
                k.coeffs.remove(&m);
            } else {
                k.coeffs.insert(m, v);
            }
        }
        Ok(k)
    }

    /// A kernel with i.i.d. standard normal coefficients on every canonical index.
    pub fn random<R: Rng + ?Sized>(dim: usize, order: usize, rng: &mut R) -> Self {
        let coeffs = canonical_indices(dim, order)
            .map(|m| (m, rng.sample::<f64, _>(StandardNormal)))
            .collect();
        Self { dim, order, coeffs }
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

    /// Number of stored canonical entries.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Stored `(canonical index, value)` pairs in index order.
    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (k, *v))
    }

    /// Value of the full tensor at an arbitrary tuple.
    pub fn get(&self, tuple: &[usize]) -> Result<f64> {
        if tuple.len() != self.order {
            return Err(ChaosError::OrderMismatch {
                left: self.order,
                right: tuple.len(),
            });
        }
        let m = MultiIndex::canonical(tuple, self.dim)?;
        Ok(self.coeffs.get(&m).copied().unwrap_or(0.0))
    }

    /// The value of an order-0 kernel.
    pub fn scalar_value(&self) -> Option<f64> {
        (self.order == 0).then(|| self.coeffs.values().next().copied().unwrap_or(0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(m, v)| m.multiplicity() * v * v)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(ChaosError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if self.order != other.order {
            return Err(ChaosError::OrderMismatch {
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    /// `<f, g>` in `L^2(T^q)`: the sum over all `d^q` tuples of `f g`.
    pub fn inner_product(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(small
            .coeffs
            .iter()
            .filter_map(|(m, v)| large.coeffs.get(m).map(|w| m.multiplicity() * v * w))
            .sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut acc: BTreeMap<MultiIndex, Accum> = BTreeMap::new();
        for (m, v) in self.coeffs.iter().chain(other.coeffs.iter()) {
            acc.entry(m.clone()).or_default().add(*v);
        }
        let coeffs = acc
            .into_iter()
            .filter_map(|(m, a)| a.value().map(|v| (m, v)))
            .collect();
        Ok(Self::from_map(self.dim, self.order, coeffs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero(self.dim, self.order);
        }
        let coeffs = self.coeffs.iter().map(|(m, v)| (m.clone(), v * c)).collect();
        Self::from_map(self.dim, self.order, coeffs)
    }

    fn check_contraction(&self, other: &Self, r: usize) -> Result<()> {
        if self.dim != other.dim {
            return Err(ChaosError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        if r > self.order.min(other.order) {
            return Err(ChaosError::ContractionOutOfRange {
                r,
                left: self.order,
                right: other.order,
            });
        }
        Ok(())
    }

    /// Number of tuples in the full (unsymmetrized) expansion.
    pub fn expanded_len(&self) -> u128 {
        self.coeffs
            .keys()
            .map(|m| m.multiplicity() as u128)
            .sum()
    }

    /// Writes the kernel out on every tuple, as a [`RawTensor`].
    pub fn to_raw(&self) -> Result<RawTensor> {
        let n = self.expanded_len();
        if n > EXPANSION_LIMIT {
            return Err(ChaosError::TooLarge { entries: n });
        }
        let mut coeffs = BTreeMap::new();
        for (m, v) in &self.coeffs {
            for p in m.permutations() {
                coeffs.insert(p, *v);
            }
        }
        Ok(RawTensor::from_map(self.dim, self.order, coeffs))
    }

    /// The contraction `f ⊗_r g`: entry `(a, b)` is
    /// `sum_{u in [d]^r} f(a, u) g(b, u)`.
    ///
    /// The result is not symmetric in general. It is built by expanding both
    /// kernels over all their tuples, so it is meant for small kernels; use
    /// [`contract_sym`](Self::contract_sym) in algebra.
    pub fn contract(&self, other: &Self, r: usize) -> Result<RawTensor> {
        self.check_contraction(other, r)?;
        let left = self.to_raw()?;
        let right = other.to_raw()?;
        let free_left = self.order - r;
        let free_right = other.order - r;

        let mut by_tail: BTreeMap<&[u16], Vec<(&[u16], f64)>> = BTreeMap::new();
        for (t, v) in right.iter() {
            let (b, u) = t.entries().split_at(free_right);
            by_tail.entry(u).or_default().push((b, v));
        }

        let mut acc: BTreeMap<Vec<u16>, Accum> = BTreeMap::new();
        for (t, fv) in left.iter() {
            let (a, u) = t.entries().split_at(free_left);
            if let Some(rows) = by_tail.get(u) {
                for (b, gv) in rows {
                    let mut key = Vec::with_capacity(a.len() + b.len());
                    key.extend_from_slice(a);
                    key.extend_from_slice(b);
                    acc.entry(key).or_default().add(fv * gv);
                }
            }
        }
        let coeffs = acc
            .into_iter()
            .filter_map(|(k, a)| a.value().map(|v| (MultiIndex::from_raw_unchecked(k), v)))
            .collect();
        Ok(RawTensor::from_map(
            self.dim,
            free_left + free_right,
            coeffs,
        ))
    }

    /// The symmetrized contraction `f ⊗~_r g`.
    ///
    /// Works directly on occupation counts: a pair of stored entries `α`, `β`
    /// and a shared block `μ ≤ α ∧ β` with `|μ| = r` contribute
    /// `(q-r)! (n-r)! r! / ((α-μ)! (β-μ)! μ!)` copies of `f_α g_β` to the
    /// canonical index `γ = α + β - 2μ`, which is then averaged over the
    /// `(q+n-2r)! / γ!` tuples of that type.
    pub fn contract_sym(&self, other: &Self, r: usize) -> Result<Self> {
        self.check_contraction(other, r)?;
        let d = self.dim;
        let (q, n) = (self.order, other.order);
        let out_order = q + n - 2 * r;
        let base = factorial(q - r) * factorial(n - r) * factorial(r) / factorial(out_order);

        let left: Vec<(Vec<u8>, f64)> = self.coeffs.iter().map(|(m, v)| (m.counts(d), *v)).collect();
        let right: Vec<(Vec<u8>, f64)> = other.coeffs.iter().map(|(m, v)| (m.counts(d), *v)).collect();

        let mut acc: BTreeMap<Vec<u8>, Accum> = BTreeMap::new();
        let mut cap = vec![0u8; d];
        let mut mu = vec![0u8; d];
        for (a, fa) in &left {
            for (b, gb) in &right {
                let mut avail = 0usize;
                for j in 0..d {
                    cap[j] = a[j].min(b[j]);
                    avail += cap[j] as usize;
                }
                if avail < r {
                    continue;
                }
                let fg = fa * gb;
                for_each_block(&cap, r, 0, &mut mu, &mut |mu| {
                    let mut denom = 1.0;
                    let mut gamma = vec![0u8; d];
                    for j in 0..d {
                        denom *= factorial((a[j] - mu[j]) as usize)
                            * factorial((b[j] - mu[j]) as usize)
                            * factorial(mu[j] as usize);
                        gamma[j] = a[j] + b[j] - 2 * mu[j];
                    }
                    acc.entry(gamma).or_default().add(fg / denom);
                });
            }
        }

        let coeffs = acc
            .into_iter()
            .filter_map(|(gamma, a)| {
                a.value()
                    .map(|s| (MultiIndex::from_counts(&gamma), s * counts_factorial(&gamma) * base))
            })
            .collect();
        Ok(Self::from_map(d, out_order, coeffs))
    }

    /// Applies the basis change `e_j -> sum_i m[i][j] e_i` in every slot:
    /// the new value at `(i_1..i_q)` is `sum_j prod_l m[i_l][j_l] f(j_1..j_q)`.
    /// `matrix` is row-major `d x d`.
    pub fn change_basis(&self, matrix: &[f64]) -> Result<Self> {
        let d = self.dim;
        if matrix.len() != d * d {
            return Err(ChaosError::DimensionMismatch {
                left: d * d,
                right: matrix.len(),
            });
        }
        let size = (d as u128).pow(self.order as u32);
        if size > EXPANSION_LIMIT {
            return Err(ChaosError::TooLarge { entries: size });
        }
        let size = size as usize;
        let mut dense = vec![0.0; size];
        for (m, v) in &self.coeffs {
            for p in m.permutations() {
                dense[flat_index(p.entries(), d)] = *v;
            }
        }
        let mut next = vec![0.0; size];
        for mode in 0..self.order {
            let stride = d.pow((self.order - 1 - mode) as u32);
            next.iter_mut().for_each(|x| *x = 0.0);
            for pos in 0..size {
                let v = dense[pos];
                if v == 0.0 {
                    continue;
                }
                let j = (pos / stride) % d;
                let base = pos - j * stride;
                for i in 0..d {
                    next[base + i * stride] += matrix[i * d + j] * v;
                }
            }
            std::mem::swap(&mut dense, &mut next);
        }
        let coeffs = canonical_indices(d, self.order)
            .filter_map(|m| {
                let v = dense[flat_index(m.entries(), d)];
                (v != 0.0).then_some((m, v))
            })
            .collect();
        Ok(Self::from_map(d, self.order, coeffs))
    }
}

fn flat_index(tuple: &[u16], d: usize) -> usize {
    tuple.iter().fold(0, |acc, &i| acc * d + i as usize)
}

/// Visits every `mu` with `mu[j] <= cap[j]` for `j >= from` and
/// `sum mu[from..] = remaining`.
fn for_each_block<F: FnMut(&[u8])>(cap: &[u8], remaining: usize, from: usize, mu: &mut [u8], f: &mut F) {
    if from == cap.len() {
        if remaining == 0 {
            f(mu);
        }
        return;
    }
    let tail: usize = cap[from + 1..].iter().map(|&c| c as usize).sum();
    let lo = remaining.saturating_sub(tail);
    let hi = remaining.min(cap[from] as usize);
    for k in lo..=hi {
        mu[from] = k as u8;
        for_each_block(cap, remaining - k, from + 1, mu, f);
    }
    mu[from] = 0;
}

/// All canonical multi-indices of the given order over `dim` basis vectors.
pub fn canonical_indices(dim: usize, order: usize) -> Box<dyn Iterator<Item = MultiIndex>> {
    if order == 0 {
        return Box::new(std::iter::once(MultiIndex::default()));
    }
    Box::new(
        (0..dim as u16)
            .combinations_with_replacement(order)
            .map(MultiIndex::from_sorted_unchecked),
    )
}

/// `e_{i_1} ⊗~ ... ⊗~ e_{i_q}`; see [`SymmetricKernel::basis`].
pub fn basis_kernel(dim: usize, indices: &[usize]) -> Result<SymmetricKernel> {
    SymmetricKernel::basis(dim, indices)
}

/// Symmetrization of a raw tensor with the default order bound.
pub fn symmetrize(t: &RawTensor) -> Result<SymmetricKernel> {
    t.symmetrize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const EPS: f64 = 1e-12;

    fn e(d: usize, idx: &[usize]) -> SymmetricKernel {
        SymmetricKernel::basis(d, idx).unwrap()
    }

    #[test]
    fn basis_kernel_norms() {
        assert!((e(3, &[0]).norm_sq() - 1.0).abs() < EPS);
        assert!((e(3, &[0, 0]).norm_sq() - 1.0).abs() < EPS);
        let k = e(3, &[0, 1]);
        assert!((k.norm_sq() - 0.5).abs() < EPS);
        assert_eq!(k.get(&[1, 0]).unwrap(), 0.5);
        assert!(SymmetricKernel::basis(3, &[3]).is_err());
    }

    #[test]
    fn inner_products() {
        let a = e(3, &[0, 0]);
        assert!((a.inner_product(&a).unwrap() - 1.0).abs() < EPS);
        let b = e(3, &[0, 1]);
        assert!((b.inner_product(&b).unwrap() - 0.5).abs() < EPS);
        assert_eq!(a.inner_product(&e(3, &[1, 1])).unwrap(), 0.0);
        assert!(a.inner_product(&e(3, &[0])).is_err());
        assert!(a.inner_product(&e(4, &[0, 0])).is_err());
    }

    #[test]
    fn raw_contraction_examples() {
        let c = e(2, &[0, 0]).contract(&e(2, &[0, 1]), 1).unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c.len(), 1);
        assert!((c.get(&[0, 1]).unwrap() - 0.5).abs() < EPS);
        assert_eq!(c.get(&[1, 0]).unwrap(), 0.0);

        let z = e(2, &[0, 0]).contract(&e(2, &[1, 1]), 1).unwrap();
        assert_eq!(z.len(), 0);

        let f = e(3, &[0, 2]);
        let full = f.contract(&f, 2).unwrap();
        assert!((full.scalar_value().unwrap() - f.norm_sq()).abs() < EPS);
        assert!(f.contract(&f, 3).is_err());
    }

    #[test]
    fn tensor_product_is_zero_contraction() {
        let f = e(2, &[0]);
        let g = e(2, &[1]);
        let t = f.contract(&g, 0).unwrap();
        assert_eq!(t.get(&[0, 1]).unwrap(), 1.0);
        assert_eq!(t.get(&[1, 0]).unwrap(), 0.0);
        assert_eq!(f.contract_sym(&g, 0).unwrap(), e(2, &[0, 1]));
    }

    #[test]
    fn sym_contraction_of_projection() {
        let p = e(2, &[0, 0]);
        assert_eq!(p.contract_sym(&p, 1).unwrap(), p);
    }

    #[test]
    fn sym_contraction_matches_symmetrized_raw() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let d = rng.gen_range(1..=3);
            let q = rng.gen_range(0..=3);
            let n = rng.gen_range(0..=3);
            let f = SymmetricKernel::random(d, q, &mut rng);
            let g = SymmetricKernel::random(d, n, &mut rng);
            for r in 0..=q.min(n) {
                let fast = f.contract_sym(&g, r).unwrap();
                let slow = f.contract(&g, r).unwrap().symmetrize().unwrap();
                let diff = fast.sub(&slow).unwrap().norm();
                assert!(diff < 1e-10 * (1.0 + slow.norm()), "d={d} q={q} n={n} r={r}");
            }
        }
    }

    #[test]
    fn add_and_scale() {
        let s = e(3, &[0, 0]).add(&e(3, &[1, 1])).unwrap();
        assert!((s.norm_sq() - 2.0).abs() < EPS);
        assert!(s.scale(0.0).is_zero());
        assert!((e(3, &[0, 1]).scale(2.0).norm_sq() - 2.0).abs() < EPS);
        let cancel = s.sub(&s).unwrap();
        assert!(cancel.is_zero());
        assert!(s.add(&e(3, &[0])).is_err());
    }

    #[test]
    fn zero_kernels_are_accepted() {
        let z = SymmetricKernel::zero(3, 2);
        let f = e(3, &[0, 1]);
        assert_eq!(z.inner_product(&f).unwrap(), 0.0);
        assert!(z.contract_sym(&f, 1).unwrap().is_zero());
        assert!(z.contract(&f, 2).unwrap().scalar_value().unwrap() == 0.0);
    }

    #[test]
    fn change_basis_identity_and_swap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SymmetricKernel::random(3, 3, &mut rng);
        let id = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert_eq!(f.change_basis(&id).unwrap(), f);
        let swap = [0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let g = e(3, &[0, 0, 2]).change_basis(&swap).unwrap();
        assert_eq!(g, e(3, &[1, 1, 2]));
    }

    #[test]
    fn canonical_index_counts() {
        assert_eq!(canonical_indices(3, 0).count(), 1);
        assert_eq!(canonical_indices(3, 2).count(), 6);
        assert_eq!(canonical_indices(4, 4).count(), 35);
    }
}

/// Accumulates scaled kernels of one order and prunes cancellation noise once.
pub(crate) struct KernelSum {
    dim: usize,
    order: usize,
    acc: BTreeMap<MultiIndex, Accum>,
}

impl KernelSum {
    pub(crate) fn new(dim: usize, order: usize) -> Self {
        Self {
            dim,
            order,
            acc: BTreeMap::new(),
        }
    }

    pub(crate) fn add_scaled(&mut self, k: &SymmetricKernel, c: f64) {
        debug_assert_eq!(k.order, self.order);
        if c == 0.0 {
            return;
        }
        for (m, v) in &k.coeffs {
            self.acc.entry(m.clone()).or_default().add(c * v);
        }
    }

    pub(crate) fn finish(self) -> SymmetricKernel {
        let coeffs = self
            .acc
            .into_iter()
            .filter_map(|(m, a)| a.value().map(|v| (m, v)))
            .collect();
        SymmetricKernel::from_map(self.dim, self.order, coeffs)
    }
}
