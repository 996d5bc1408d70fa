use thiserror::Error;

/// Errors produced by the model, solvers and simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("energy lattice needs {required} cells, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("degenerate scenario: {0}")]
    Degenerate(String),

    #[error("root bracket invalid on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("threshold iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize, trace: Vec<String> },

    #[error("slice out of range: {0}")]
    SliceOutOfRange(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
