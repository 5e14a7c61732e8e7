use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combinatorics::multinomial;
use crate::error::{ChaosError, Result};

/// A tuple of zero-based basis indices.
///
/// Kernels store their coefficients on canonical (non-decreasing) tuples;
/// [`MultiIndex::canonical`] sorts on construction. Unsorted tuples only
/// appear as keys of a [`RawTensor`](super::RawTensor).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u16>);

impl MultiIndex {
    /// Builds the canonical form of `entries`, checking every index against `dim`.
    pub fn canonical(entries: &[usize], dim: usize) -> Result<Self> {
        let mut v = Self::checked(entries, dim)?;
        v.sort_unstable();
        Ok(Self(v))
    }

    /// Keeps the given order, for raw tensors.
    pub fn ordered(entries: &[usize], dim: usize) -> Result<Self> {
        Ok(Self(Self::checked(entries, dim)?))
    }

    fn checked(entries: &[usize], dim: usize) -> Result<Vec<u16>> {
        entries
            .iter()
            .map(|&i| {
                if i < dim && i <= u16::MAX as usize {
                    Ok(i as u16)
                } else {
                    Err(ChaosError::IndexOutOfRange { index: i, dim })
                }
            })
            .collect()
    }

    pub(crate) fn from_sorted_unchecked(entries: Vec<u16>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0] <= w[1]));
        Self(entries)
    }

    pub(crate) fn from_raw_unchecked(entries: Vec<u16>) -> Self {
        Self(entries)
    }

    /// Canonical index with the given occupation counts.
    pub fn from_counts(counts: &[u8]) -> Self {
        let mut v = Vec::with_capacity(counts.iter().map(|&k| k as usize).sum());
        for (j, &k) in counts.iter().enumerate() {
            v.extend(std::iter::repeat(j as u16).take(k as usize));
        }
        Self(v)
    }

    pub fn entries(&self) -> &[u16] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }

    /// The sorted copy of this tuple.
    pub fn to_canonical(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_unstable();
        Self(v)
    }

    /// How many times each basis index occurs.
    pub fn counts(&self, dim: usize) -> Vec<u8> {
        let mut c = vec![0u8; dim];
        for &i in &self.0 {
            c[i as usize] += 1;
        }
        c
    }

    /// Number of distinct tuples that sort to this index, `q! / prod k_j!`.
    pub fn multiplicity(&self) -> f64 {
        let mut counts = Vec::new();
        let mut iter = self.0.iter().peekable();
        while let Some(&i) = iter.next() {
            let mut k = 1u8;
            while iter.peek() == Some(&&i) {
                iter.next();
                k += 1;
            }
            counts.push(k);
        }
        multinomial(&counts)
    }

    /// All distinct orderings of this tuple, in lexicographic order.
    pub fn permutations(&self) -> Vec<MultiIndex> {
        let mut cur = self.0.clone();
        cur.sort_unstable();
        let mut out = vec![Self(cur.clone())];
        while next_permutation(&mut cur) {
            out.push(Self(cur.clone()));
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

fn next_permutation(v: &mut [u16]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_sorts_and_checks_range() {
        let m = MultiIndex::canonical(&[2, 0, 1], 3).unwrap();
        assert_eq!(m.entries(), &[0, 1, 2]);
        assert!(matches!(
            MultiIndex::canonical(&[3], 3),
            Err(ChaosError::IndexOutOfRange { index: 3, dim: 3 })
        ));
    }

    #[test]
    fn multiplicity_matches_permutation_count() {
        for idx in [vec![0, 0, 1, 2], vec![1, 1, 1], vec![0, 1, 2, 3], vec![]] {
            let m = MultiIndex::canonical(&idx, 4).unwrap();
            assert_eq!(m.multiplicity(), m.permutations().len() as f64);
        }
    }

    #[test]
    fn counts_round_trip() {
        let m = MultiIndex::canonical(&[3, 0, 3, 1], 4).unwrap();
        assert_eq!(m.counts(4), vec![1, 1, 0, 2]);
        assert_eq!(MultiIndex::from_counts(&m.counts(4)), m);
    }
}
