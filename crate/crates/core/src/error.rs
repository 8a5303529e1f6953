use thiserror::Error;

use crate::game::Player;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("strategy has length {found}, game expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected a strategy for {expected}, got one for {found}")]
    WrongPlayer { expected: Player, found: Player },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("index {index} out of range (0..{bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exact solver limited to min(rows, cols) <= {cap}, got {min_dim}; use solve_mwu")]
    ExactCapExceeded { min_dim: usize, cap: usize },

    #[error("exact solver gave up after {tried} support pairs; use solve_mwu")]
    SupportBudgetExhausted { tried: u64 },

    #[error("no support pair produced a verified equilibrium")]
    NoExactSolution,

    #[error("opponent strategy {target} cannot be covered at threshold {threshold}")]
    Uncoverable { target: usize, threshold: f64 },

    #[error("game value {value} is below the required {required}; the family is too strong")]
    ValueTooLow { value: f64, required: f64 },

    #[error("game value {value} leaves no gap below 1/2; majority voting cannot be guaranteed")]
    NoValueGap { value: f64 },

    #[error("program {program} never exceeds the step budget; no dovetailing input set exists")]
    NeverExceeds { program: String },

    #[error("program {0} has no cost function")]
    MissingCost(String),

    #[error("refusing to use an unverified anti-checker")]
    Unverified,

    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
