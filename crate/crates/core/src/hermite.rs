//! Probabilists' Hermite polynomials, `He_0 = 1`, `He_1 = x`,
//! `He_{k+1} = x He_k - k He_{k-1}`.
//!
//! `I_q(e_j^{⊗q}) = He_q(W(e_j))`, and products over distinct basis
//! directions factor, which is how chaos elements are evaluated pointwise.

/// `[He_0(x), ..., He_max(x)]`.
pub fn hermite_table(x: f64, max_degree: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(max_degree + 1);
    t.push(1.0);
    if max_degree >= 1 {
        t.push(x);
    }
    for k in 1..max_degree {
        let next = x * t[k] - k as f64 * t[k - 1];
        t.push(next);
    }
    t
}

pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}
