use thiserror::Error;

pub type Result<T> = std::result::Result<T, ChaosError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChaosError {
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("contraction index {r} out of range for orders {left} and {right}")]
    ContractionOutOfRange { r: usize, left: usize, right: usize },

    #[error("order {order} exceeds the configured maximum {max}{}", context_suffix(.context))]
    OrderOverflow {
        order: usize,
        max: usize,
        context: Option<String>,
    },

    #[error("dense expansion of {entries} entries is too large")]
    TooLarge { entries: u128 },

    #[error("element must be centered, found constant term {constant}")]
    NotCentered { constant: f64 },

    #[error("order {order} must be even")]
    OddOrder { order: usize },

    #[error("precondition violated: {}", .0.join("; "))]
    Precondition(Vec<String>),

    #[error("kernels are not independent{}: contraction defect {defect:e} > tolerance {tolerance:e}", step_suffix(.step))]
    NotIndependent {
        defect: f64,
        tolerance: f64,
        step: Option<usize>,
    },

    #[error("empty sample batch")]
    EmptyBatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn context_suffix(context: &Option<String>) -> String {
    context
        .as_ref()
        .map(|c| format!(" ({c})"))
        .unwrap_or_default()
}

fn step_suffix(step: &Option<usize>) -> String {
    step.map(|k| format!(" at k = {k}")).unwrap_or_default()
}
