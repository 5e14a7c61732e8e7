//! Seeded Monte Carlo sampling of chaos elements and empirical statistics.
//!
//! Sample `i` of a run with seed `s` is drawn from its own ChaCha8 stream
//! (`seed = s`, `stream = i`), so a batch is the same whatever the thread
//! schedule or the feature set.

mod counterexample;
mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::chaos_algebra::ChaosElement;
use crate::error::{ChaosError, Result};
use crate::par::{map_range, Execution};

pub use counterexample::{
    bernoulli_element, counterexample_chaos, counterexample_direct, shifted_gamma_direct, sign_element,
    CounterexampleBatches, SignExpansionCoeffs, COUNTEREXAMPLE_DIM,
};
pub use stats::{
    dkw_bound, empirical_char_fn, empirical_moment, ks_distance, ks_distance_cdf, ks_two_sample,
    MomentEstimate,
};

/// A realization of `(W(e_0), ..., W(e_{d-1}))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPoint {
    coords: Vec<f64>,
}

impl GaussianPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    /// Draws `d` independent standard normals from `rng`.
    pub fn sample<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self::new((0..d).map(|_| rng.sample(StandardNormal)).collect())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Draws of one scalar variable, tagged with the seed that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub values: Vec<f64>,
    pub seed: u64,
    pub n: usize,
}

impl SampleBatch {
    pub fn new(values: Vec<f64>, seed: u64) -> Self {
        let n = values.len();
        Self { values, seed, n }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n as f64
    }

    /// Single-column CSV with a `# seed=` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# seed={}\nvalue\n", self.seed);
        for v in &self.values {
            out.push_str(&format!("{v:?}\n"));
        }
        out
    }
}

/// The generator for sample `index` of a run seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Evaluates `f` at `n` independent Gaussian points.
pub fn sample(f: &ChaosElement, n: usize, seed: u64, exec: Execution) -> Result<SampleBatch> {
    if n == 0 {
        return Err(ChaosError::InvalidParameter("sample size must be >= 1".into()));
    }
    let d = f.dim();
    let values = map_range(n, exec, |i| {
        let point = GaussianPoint::sample(d, &mut substream(seed, i as u64));
        f.evaluate(&point)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(SampleBatch::new(values, seed))
}

/// Uniformly random `d x d` orthogonal matrix, row-major, from Gram-Schmidt
/// applied to a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut ok = true;
        for i in 0..d {
            for j in 0..i {
                let dot: f64 = (0..d).map(|k| rows[i][k] * rows[j][k]).sum();
                for k in 0..d {
                    rows[i][k] -= dot * rows[j][k];
                }
            }
            let norm = rows[i].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            rows[i].iter_mut().for_each(|v| *v /= norm);
        }
        if ok {
            return rows.concat();
        }
    }
}
