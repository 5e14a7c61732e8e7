//! Factorials, binomials and multinomial weights in `f64`.
//!
//! Values up to `22!` are exact in double precision; beyond that they carry
//! the usual relative rounding of a single multiplication chain.

const TABLE_LEN: usize = 171;

fn factorial_table() -> &'static [f64; TABLE_LEN] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; TABLE_LEN];
        for n in 1..TABLE_LEN {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

/// `n!`, infinite past 170.
pub fn factorial(n: usize) -> f64 {
    factorial_table()
        .get(n)
        .copied()
        .unwrap_or(f64::INFINITY)
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Number of distinct orderings of a multiset with the given occupation
/// counts: `(sum k)! / prod k!`.
pub fn multinomial(counts: &[u8]) -> f64 {
    let mut total = 0usize;
    let mut acc = 1.0;
    for &k in counts {
        let k = k as usize;
        total += k;
        acc *= binomial(total, k);
    }
    acc
}

/// `prod k!` over the occupation counts.
pub fn counts_factorial(counts: &[u8]) -> f64 {
    counts.iter().map(|&k| factorial(k as usize)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(binomial(30, 15), 155_117_520.0);
        assert_eq!(multinomial(&[2, 1, 1]), 12.0);
        assert_eq!(multinomial(&[]), 1.0);
    }
}
