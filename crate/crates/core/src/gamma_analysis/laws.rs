use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::special::{ln_gamma, regularized_lower_gamma};
use crate::error::{ChaosError, Result};

/// The centered Gamma law `F(ν) = 2 G(ν/2) - ν`, `G(a) ~ Γ(a, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenteredGammaLaw {
    nu: f64,
}

impl CenteredGammaLaw {
    pub fn new(nu: f64) -> Result<Self> {
        if nu > 0.0 && nu.is_finite() {
            Ok(Self { nu })
        } else {
            Err(ChaosError::InvalidParameter(format!("nu must be positive, got {nu}")))
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mean(&self) -> f64 {
        0.0
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.nu
    }

    pub fn third_moment(&self) -> f64 {
        8.0 * self.nu
    }

    pub fn fourth_moment(&self) -> f64 {
        12.0 * self.nu * self.nu + 48.0 * self.nu
    }

    /// `E exp(iλF(ν)) = (e^{-iλ} / sqrt(1 - 2iλ))^ν`, evaluated as
    /// `exp(ν (-iλ - log(1 - 2iλ) / 2))`. The principal logarithm is the
    /// right branch since `Re(1 - 2iλ) = 1`.
    pub fn char_fn(&self, lambda: f64) -> Complex64 {
        let i = Complex64::i();
        let inner = -i * lambda - 0.5 * (Complex64::new(1.0, -2.0 * lambda)).ln();
        (self.nu * inner).exp()
    }

    /// `P(F(ν) <= x) = P(ν/2, (x + ν)/2)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -self.nu {
            0.0
        } else {
            regularized_lower_gamma(self.nu / 2.0, (x + self.nu) / 2.0)
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let a = self.nu / 2.0;
        let y = (x + self.nu) / 2.0;
        if y <= 0.0 {
            return 0.0;
        }
        0.5 * ((a - 1.0) * y.ln() - y - ln_gamma(a)).exp()
    }

    /// Inverse CDF by bracketing and bisection.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return -self.nu;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        let mut lo = -self.nu;
        let mut hi = self.nu.max(1.0);
        while self.cdf(hi) < p {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `Γ(a, λ)` with density `λ^a / Γ(a) x^{a-1} e^{-λx}` on `x > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaLaw {
    shape: f64,
    rate: f64,
}

impl GammaLaw {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite() {
            Ok(Self { shape, rate })
        } else {
            Err(ChaosError::InvalidParameter(format!(
                "shape and rate must be positive, got ({shape}, {rate})"
            )))
        }
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn second_moment(&self) -> f64 {
        self.shape * (self.shape + 1.0) / (self.rate * self.rate)
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        (self.shape * self.rate.ln() - ln_gamma(self.shape) + (self.shape - 1.0) * x.ln() - self.rate * x).exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        regularized_lower_gamma(self.shape, self.rate * x)
    }

    /// `(1 - iλ/rate)^{-shape}`.
    pub fn char_fn(&self, lambda: f64) -> Complex64 {
        (-self.shape * Complex64::new(1.0, -lambda / self.rate).ln()).exp()
    }
}
