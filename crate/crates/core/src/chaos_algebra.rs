//! Finite Wiener chaos expansions `F = c + sum_n I_n(f_n)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, factorial};
use crate::error::{ChaosError, Result};
use crate::hermite::hermite_table;
use crate::simulation::GaussianPoint;
use crate::tensor_kernels::{parse_kernel_block, KernelSum, SymmetricKernel};
use crate::DEFAULT_MAX_ORDER;

/// A finite chaos decomposition over a `d`-dimensional Gaussian space.
///
/// Only nonzero kernels of order `>= 1` are stored; the order-0 part is the
/// `constant`, which is also the expectation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChaosElement {
    dim: usize,
    constant: f64,
    kernels: BTreeMap<usize, SymmetricKernel>,
}

impl ChaosElement {
    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, 0.0)
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            dim,
            constant: c,
            kernels: BTreeMap::new(),
        }
    }

    /// `I_q(f)` for a kernel of order `q >= 1`.
    pub fn from_kernel(f: SymmetricKernel) -> Result<Self> {
        if f.order() == 0 {
            return Err(ChaosError::InvalidParameter(
                "from_kernel needs a kernel of order >= 1; use ChaosElement::constant".into(),
            ));
        }
        let mut e = Self::zero(f.dim());
        if !f.is_zero() {
            e.kernels.insert(f.order(), f);
        }
        Ok(e)
    }

    /// Assembles `c + sum I_n(f_n)`; two kernels of the same order are added.
    pub fn from_parts<I>(dim: usize, constant: f64, kernels: I) -> Result<Self>
    where
        I: IntoIterator<Item = SymmetricKernel>,
    {
        let mut e = Self::constant(dim, constant);
        for k in kernels {
            if k.dim() != dim {
                return Err(ChaosError::DimensionMismatch {
                    left: dim,
                    right: k.dim(),
                });
            }
            if k.order() == 0 {
                e.constant += k.scalar_value().unwrap_or(0.0);
                continue;
            }
            let merged = match e.kernels.remove(&k.order()) {
                Some(prev) => prev.add(&k)?,
                None => k,
            };
            e.insert(merged);
        }
        Ok(e)
    }

    fn insert(&mut self, k: SymmetricKernel) {
        if !k.is_zero() {
            self.kernels.insert(k.order(), k);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The order-0 term, `E(F)`.
    pub fn expectation(&self) -> f64 {
        self.constant
    }

    pub fn kernel(&self, order: usize) -> Option<&SymmetricKernel> {
        self.kernels.get(&order)
    }

    /// Nonzero kernels in increasing order.
    pub fn kernels(&self) -> impl Iterator<Item = &SymmetricKernel> + '_ {
        self.kernels.values()
    }

    /// Highest order with a nonzero kernel, 0 for constants.
    pub fn max_order(&self) -> usize {
        self.kernels.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_centered(&self) -> bool {
        self.constant == 0.0
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(ChaosError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::constant(self.dim, self.constant + other.constant);
        let orders: std::collections::BTreeSet<usize> =
            self.kernels.keys().chain(other.kernels.keys()).copied().collect();
        for n in orders {
            let k = match (self.kernels.get(&n), other.kernels.get(&n)) {
                (Some(a), Some(b)) => a.add(b)?,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            };
            out.insert(k);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = Self::constant(self.dim, self.constant * c);
        for k in self.kernels.values() {
            out.insert(k.scale(c));
        }
        out
    }

    /// Adds `c` to the constant term only.
    pub fn shift(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.constant += c;
        out
    }

    /// `F - E(F)`.
    pub fn centered(&self) -> Self {
        let mut out = self.clone();
        out.constant = 0.0;
        out
    }

    /// Product with the default order bound.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_within(other, DEFAULT_MAX_ORDER)
    }

    /// The product `F G`, expanded order pair by order pair with
    /// `I_m(f) I_n(g) = sum_l l! C(m,l) C(n,l) I_{m+n-2l}(f ⊗~_l g)`.
    pub fn multiply_within(&self, other: &Self, max_order: usize) -> Result<Self> {
        self.check_dim(other)?;
        for &m in self.kernels.keys() {
            for &n in other.kernels.keys() {
                if m + n > max_order {
                    return Err(ChaosError::OrderOverflow {
                        order: m + n,
                        max: max_order,
                        context: Some(format!("product of orders {m} and {n}")),
                    });
                }
            }
        }

        let d = self.dim;
        let mut constant = self.constant * other.constant;
        let mut sums: BTreeMap<usize, KernelSum> = BTreeMap::new();
        let mut push = |k: &SymmetricKernel, c: f64| {
            sums.entry(k.order())
                .or_insert_with(|| KernelSum::new(d, k.order()))
                .add_scaled(k, c);
        };

        for g in other.kernels.values() {
            push(g, self.constant);
        }
        for f in self.kernels.values() {
            push(f, other.constant);
        }
        for (&m, f) in &self.kernels {
            for (&n, g) in &other.kernels {
                for l in 0..=m.min(n) {
                    let coef = factorial(l) * binomial(m, l) * binomial(n, l);
                    if m == n && l == m {
                        constant += coef * f.inner_product(g)?;
                    } else {
                        push(&f.contract_sym(g, l)?, coef);
                    }
                }
            }
        }

        let mut out = Self::constant(d, constant);
        for (_, s) in sums {
            out.insert(s.finish());
        }
        Ok(out)
    }

    /// `Cov(F, G) = sum_n n! <f_n, g_n>`.
    pub fn covariance(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let mut acc = 0.0;
        for (&n, f) in &self.kernels {
            if let Some(g) = other.kernels.get(&n) {
                acc += factorial(n) * f.inner_product(g)?;
            }
        }
        Ok(acc)
    }

    pub fn variance(&self) -> f64 {
        self.kernels
            .iter()
            .map(|(&n, f)| factorial(n) * f.norm_sq())
            .sum()
    }

    /// `E(F^2) = c^2 + sum_n n! |f_n|^2`.
    pub fn second_moment(&self) -> f64 {
        self.variance() + self.constant * self.constant
    }

    pub fn exact_moment(&self, p: usize) -> Result<f64> {
        self.exact_moment_within(p, DEFAULT_MAX_ORDER)
    }

    /// `E(F^p)` through the product algebra.
    ///
    /// `F^p` is split as `F^a F^b` with `a = ceil(p/2)`, `b = floor(p/2)`, and
    /// `E(F^a F^b)` is read off with the isometry, so only powers up to order
    /// `a * max_order(F)` are ever built.
    pub fn exact_moment_within(&self, p: usize, max_order: usize) -> Result<f64> {
        match p {
            0 => return Ok(1.0),
            1 => return Ok(self.constant),
            _ => {}
        }
        let a = p.div_ceil(2);
        let b = p / 2;
        let needed = a * self.max_order();
        if needed > max_order {
            return Err(ChaosError::OrderOverflow {
                order: needed,
                max: max_order,
                context: Some(format!("moment of order {p}")),
            });
        }
        let mut powers = vec![self.clone()];
        for _ in 1..a {
            let next = powers.last().unwrap().multiply_within(self, max_order)?;
            powers.push(next);
        }
        let left = &powers[a - 1];
        let right = &powers[b - 1];
        Ok(left.covariance(right)? + left.expectation() * right.expectation())
    }

    /// Pointwise value at `W(e_j) = x_j`:
    /// `c + sum_n sum_α mult(α) f_n(α) prod_j He_{α_j}(x_j)`.
    pub fn evaluate(&self, x: &GaussianPoint) -> Result<f64> {
        self.evaluate_coords(x.coords())
    }

    pub fn evaluate_coords(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(ChaosError::DimensionMismatch {
                left: self.dim,
                right: x.len(),
            });
        }
        let top = self.max_order();
        let tables: Vec<Vec<f64>> = x.iter().map(|&xi| hermite_table(xi, top)).collect();
        let mut total = self.constant;
        for f in self.kernels.values() {
            for (m, v) in f.iter() {
                let e = m.entries();
                let mut prod = m.multiplicity() * v;
                let mut i = 0;
                while i < e.len() {
                    let j = e[i];
                    let mut k = 1;
                    while i + k < e.len() && e[i + k] == j {
                        k += 1;
                    }
                    prod *= tables[j as usize][k];
                    i += k;
                }
                total += prod;
            }
        }
        Ok(total)
    }

    /// Applies [`SymmetricKernel::change_basis`] to every kernel.
    pub fn change_basis(&self, matrix: &[f64]) -> Result<Self> {
        let mut out = Self::constant(self.dim, self.constant);
        for k in self.kernels.values() {
            out.insert(k.change_basis(matrix)?);
        }
        Ok(out)
    }
}

/// `I_q(f)` as a free function.
pub fn from_kernel(f: SymmetricKernel) -> Result<ChaosElement> {
    ChaosElement::from_kernel(f)
}

/// Text form: a `constant c` line followed by one kernel block per order.
impl fmt::Display for ChaosElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "constant {:?}", self.constant)?;
        if self.kernels.is_empty() {
            // keeps the dimension recoverable for constants
            write!(f, "{}", SymmetricKernel::zero(self.dim, 1))?;
        }
        for k in self.kernels.values() {
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl FromStr for ChaosElement {
    type Err = ChaosError;

    fn from_str(s: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let Some(&(no, head)) = lines.first() else {
            return Err(ChaosError::Parse {
                line: 1,
                message: "missing `constant c` line".into(),
            });
        };
        let constant = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["constant", c] => c.parse::<f64>().map_err(|_| ChaosError::Parse {
                line: no,
                message: format!("bad constant `{c}`"),
            })?,
            _ => {
                return Err(ChaosError::Parse {
                    line: no,
                    message: "expected `constant c`".into(),
                })
            }
        };
        let mut rest = &lines[1..];
        let mut kernels = Vec::new();
        while !rest.is_empty() {
            let (k, used) = parse_kernel_block(rest)?;
            kernels.push(k);
            rest = &rest[used..];
        }
        let Some(dim) = kernels.first().map(SymmetricKernel::dim) else {
            return Err(ChaosError::Parse {
                line: no,
                message: "no kernel block; the dimension is unknown".into(),
            });
        };
        let mut seen = std::collections::BTreeSet::new();
        for k in &kernels {
            if k.order() > 0 && !seen.insert(k.order()) {
                return Err(ChaosError::Parse {
                    line: no,
                    message: format!("two blocks of order {}", k.order()),
                });
            }
        }
        ChaosElement::from_parts(dim, constant, kernels)
    }
}
