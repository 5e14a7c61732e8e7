//! Gamma laws, the Gamma criterion functionals and the Cramér split checks.

mod criteria;
mod laws;
pub mod special;

pub use criteria::{
    asymptotic_criterion, chaos_criterion_distance, cramer_split_check, criterion_distance,
    criterion_distance_within, fourth_moment_decomposition, fourth_moment_formula, projection_constant,
    third_moment_formula, CriterionReport, MomentFormula, Verdict, NORMALIZATION_TOLERANCE, ZERO_TOLERANCE,
};
pub use laws::{CenteredGammaLaw, GammaLaw};
