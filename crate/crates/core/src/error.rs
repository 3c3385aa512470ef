use thiserror::Error;

use crate::treewidth::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("price vector has length {got}, instance has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("negative price {price} on vertex {vertex}")]
    NegativePrice { vertex: usize, price: String },

    #[error("budget {budget} of consumer {index} is not integral")]
    NonIntegralBudget { index: usize, budget: String },

    #[error("budget {budget} of consumer {index} exceeds the price cap {cap}")]
    BudgetExceedsCap { index: usize, budget: String, cap: u64 },

    #[error("brute force needs {states} evaluations, limit is {limit}")]
    EnumerationLimit { states: u128, limit: u128 },

    #[error("table or program too large: {0}")]
    SizeCap(String),

    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(Violation),

    #[error("no tree decomposition of width <= {max_width} found (best {best_width}, exhaustive: {exhaustive})")]
    DecompositionNotFound {
        max_width: usize,
        best_width: usize,
        exhaustive: bool,
    },

    #[error("consumer {0} is not contained in any bag")]
    UncoveredConsumer(usize),

    #[error("graph is not {expected}")]
    WrongShape { expected: &'static str },

    #[error("vertex {vertex} has degree {degree}, at most {max} allowed")]
    DegreeTooHigh { vertex: usize, degree: usize, max: usize },

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear program is {0}")]
    LpNotOptimal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
