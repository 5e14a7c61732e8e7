use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SampleBatch;
use crate::error::{ChaosError, Result};
use crate::gamma_analysis::CenteredGammaLaw;

fn nonempty(batch: &SampleBatch) -> Result<()> {
    if batch.values.is_empty() {
        Err(ChaosError::EmptyBatch)
    } else {
        Ok(())
    }
}

/// `(1/n) sum_j exp(i t x_j)` at every grid point.
pub fn empirical_char_fn(batch: &SampleBatch, grid: &[f64]) -> Result<Vec<Complex64>> {
    nonempty(batch)?;
    let n = batch.values.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| {
            let (mut re, mut im) = (0.0, 0.0);
            for &x in &batch.values {
                let (s, c) = (t * x).sin_cos();
                re += c;
                im += s;
            }
            Complex64::new(re / n, im / n)
        })
        .collect())
}

/// `sup_x |F_n(x) - cdf(x)|`, evaluated at both sides of every jump.
pub fn ks_distance_cdf<F: Fn(f64) -> f64>(batch: &SampleBatch, cdf: F) -> Result<f64> {
    nonempty(batch)?;
    let mut v = batch.values.clone();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        worst = worst.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    Ok(worst)
}

pub fn ks_distance(batch: &SampleBatch, law: &CenteredGammaLaw) -> Result<f64> {
    ks_distance_cdf(batch, |x| law.cdf(x))
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &SampleBatch, b: &SampleBatch) -> Result<f64> {
    nonempty(a)?;
    nonempty(b)?;
    let mut x = a.values.clone();
    let mut y = b.values.clone();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst = 0.0f64;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        worst = worst.max((i as f64 / nx - j as f64 / ny).abs());
    }
    Ok(worst)
}

/// Half-width of the DKW band holding with probability `1 - alpha`.
pub fn dkw_bound(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

/// Sample mean of `x^p` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: f64,
    pub std_error: f64,
}

pub fn empirical_moment(batch: &SampleBatch, p: i32) -> Result<MomentEstimate> {
    nonempty(batch)?;
    let n = batch.values.len() as f64;
    let mean = batch.values.iter().map(|x| x.powi(p)).sum::<f64>() / n;
    let var = batch.values.iter().map(|x| (x.powi(p) - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(MomentEstimate {
        mean,
        std_error: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_fn_trivia() {
        let b = SampleBatch::new(vec![0.0; 5], 0);
        for v in empirical_char_fn(&b, &[0.0, 1.0, -3.0]).unwrap() {
            assert_eq!(v, Complex64::new(1.0, 0.0));
        }
        let b = SampleBatch::new(vec![1.0, -2.0, 0.3], 0);
        let v = empirical_char_fn(&b, &[0.0, 2.0]).unwrap();
        assert_eq!(v[0], Complex64::new(1.0, 0.0));
        assert!(v[1].norm() <= 1.0);
    }

    #[test]
    fn empty_batches_rejected() {
        let b = SampleBatch::new(vec![], 0);
        assert_eq!(empirical_char_fn(&b, &[1.0]), Err(ChaosError::EmptyBatch));
        assert!(ks_distance_cdf(&b, |_| 0.5).is_err());
        assert!(empirical_moment(&b, 1).is_err());
    }

    #[test]
    fn ks_of_single_point() {
        let b = SampleBatch::new(vec![0.0], 0);
        let d = ks_distance_cdf(&b, |x| if x < 0.0 { 0.0 } else { 0.5 }).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_sample_identical_is_zero() {
        let a = SampleBatch::new(vec![0.1, 0.5, -1.0], 0);
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        let b = SampleBatch::new(vec![10.0, 11.0], 0);
        assert_eq!(ks_two_sample(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn dkw_value() {
        assert!((dkw_bound(100_000, 0.001) - 0.006166).abs() < 1e-5);
    }
}
