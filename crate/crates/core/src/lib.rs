//! A finite-dimensional Wiener chaos calculus engine.
//!
//! The Gaussian space is truncated to `d` orthonormal directions
//! `e_0, ..., e_{d-1}`, so a multiple Wiener-Itô integral `I_q(f)` is
//! determined by a symmetric coefficient tensor of order `q` over `d`
//! indices. On top of that representation the crate provides:
//!
//! - [`tensor_kernels`]: symmetric kernels, contractions and symmetrization;
//! - [`chaos_algebra`]: finite chaos expansions, the product formula, exact
//!   moments and pointwise evaluation through Hermite polynomials;
//! - [`malliavin`]: `<DX, -DL^{-1}Y>`, `|DX|^2` and the independence
//!   criteria on kernels;
//! - [`gamma_analysis`]: centered Gamma laws, the Gamma criterion
//!   functionals and the moment identities behind the Cramér split;
//! - [`simulation`]: reproducible Monte Carlo sampling and the
//!   exponential/Bernoulli counterexample;
//! - [`experiments`]: the report-producing drivers behind the `chaoscalc` CLI.
//!
//! Data-parallel loops (sampling, batch evaluation, parameter sweeps) run on
//! rayon when the `parallel` feature is enabled and fall back to plain
//! iterators otherwise. Results are bit-identical either way.

pub mod chaos_algebra;
pub mod combinatorics;
pub mod error;
pub mod experiments;
pub mod gamma_analysis;
pub mod hermite;
pub mod malliavin;
pub mod par;
pub mod simulation;
pub mod tensor_kernels;

pub use chaos_algebra::ChaosElement;
pub use error::{ChaosError, Result};
pub use gamma_analysis::{CenteredGammaLaw, CriterionReport, GammaLaw, Verdict};
pub use par::Execution;
pub use simulation::{GaussianPoint, SampleBatch};
pub use tensor_kernels::{MultiIndex, RawTensor, SymmetricKernel};

/// Largest chaos order produced by kernel and chaos operations unless a
/// caller passes an explicit bound.
pub const DEFAULT_MAX_ORDER: usize = 8;

/// Upper bound on the basis dimension accepted by the experiment drivers.
pub const DEFAULT_MAX_DIMENSION: usize = 16;
