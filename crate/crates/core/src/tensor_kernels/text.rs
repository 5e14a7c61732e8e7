//! Plain-text kernel literals.
//!
//! ```text
//! order 2 dim 3
//! 1 1 0.5
//! 1 2 0.25
//! ```
//!
//! The header names the order and dimension; each following line lists the
//! sorted one-based basis indices of a canonical entry and its value. An
//! order-0 kernel has a single line holding just the value. Blank lines and
//! lines starting with `#` are ignored.

use std::fmt;
use std::str::FromStr;

use super::{MultiIndex, SymmetricKernel};
use crate::error::{ChaosError, Result};

impl fmt::Display for SymmetricKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "order {} dim {}", self.order, self.dim)?;
        for (m, v) in self.iter() {
            for i in m.entries() {
                write!(f, "{} ", i + 1)?;
            }
            writeln!(f, "{v:?}")?;
        }
        Ok(())
    }
}

impl FromStr for SymmetricKernel {
    type Err = ChaosError;

    fn from_str(s: &str) -> Result<Self> {
        let lines: Vec<(usize, &str)> = significant_lines(s).collect();
        let Some(&(first, _)) = lines.first() else {
            return Err(ChaosError::Parse {
                line: 1,
                message: "missing `order q dim d` header".into(),
            });
        };
        let (kernel, used) = parse_kernel_block(&lines)?;
        if used != lines.len() {
            return Err(ChaosError::Parse {
                line: lines[used].0,
                message: format!("unexpected content after kernel starting on line {first}"),
            });
        }
        Ok(kernel)
    }
}

pub(crate) fn significant_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_header(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let bad = || ChaosError::Parse {
        line: line_no,
        message: format!("expected `order q dim d`, found `{line}`"),
    };
    match toks.as_slice() {
        ["order", q, "dim", d] => {
            let q = q.parse().map_err(|_| bad())?;
            let d: usize = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(ChaosError::Parse {
                    line: line_no,
                    message: "dimension must be positive".into(),
                });
            }
            Ok((q, d))
        }
        _ => Err(bad()),
    }
}

/// Parses one kernel block from the front of `lines`, returning it together
/// with the number of lines consumed. The block ends at the next line that
/// does not start with a digit.
pub(crate) fn parse_kernel_block(lines: &[(usize, &str)]) -> Result<(SymmetricKernel, usize)> {
    let (line_no, header) = lines[0];
    let (order, dim) = parse_header(line_no, header)?;
    let mut kernel = SymmetricKernel::zero(dim, order);
    let mut used = 1;
    for &(no, line) in &lines[1..] {
        if !line.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.') {
            break;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != order + 1 {
            return Err(ChaosError::Parse {
                line: no,
                message: format!("expected {order} indices and a value"),
            });
        }
        let mut idx = Vec::with_capacity(order);
        for t in &toks[..order] {
            let i: usize = t.parse().map_err(|_| ChaosError::Parse {
                line: no,
                message: format!("bad index `{t}`"),
            })?;
            if i == 0 || i > dim {
                return Err(ChaosError::Parse {
                    line: no,
                    message: format!("index {i} outside 1..={dim}"),
                });
            }
            idx.push(i - 1);
        }
        let value: f64 = toks[order].parse().map_err(|_| ChaosError::Parse {
            line: no,
            message: format!("bad value `{}`", toks[order]),
        })?;
        let m = MultiIndex::canonical(&idx, dim)?;
        if kernel.coeffs.contains_key(&m) {
            return Err(ChaosError::Parse {
                line: no,
                message: "duplicate canonical index".into(),
            });
        }
        if value != 0.0 {
            kernel.coeffs.insert(m, value);
        }
        used += 1;
    }
    Ok((kernel, used))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_one_based_sorted_entries() {
        let k = SymmetricKernel::basis(3, &[2, 0]).unwrap();
        assert_eq!(k.to_string(), "order 2 dim 3\n1 3 0.5\n");
    }

    #[test]
    fn parses_with_comments_and_scalars() {
        let k: SymmetricKernel = "# a kernel\norder 0 dim 2\n\n1.5\n".parse().unwrap();
        assert_eq!(k.scalar_value(), Some(1.5));
        let k: SymmetricKernel = "order 2 dim 2\n2 1 0.25\n".parse().unwrap();
        assert_eq!(k.get(&[0, 1]).unwrap(), 0.25);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "",
            "order 2\n",
            "order 2 dim 2\n1 3 1.0\n",
            "order 2 dim 2\n1 1\n",
            "order 2 dim 2\n1 2 1.0\n2 1 1.0\n",
            "order 1 dim 2\n1 x\n",
        ] {
            assert!(bad.parse::<SymmetricKernel>().is_err(), "{bad:?}");
        }
    }
}
