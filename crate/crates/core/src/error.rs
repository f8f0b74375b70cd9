use thiserror::Error;

use crate::boundary::BoundarySolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("basis is rank deficient")]
    RankDeficient,

    /// Newton did not reach the gradient tolerance. Carries the last iterate.
    #[error(
        "solver did not converge after {} iterations (gradient norm {:.3e})",
        .0.iterations,
        .0.grad_norm
    )]
    NotConverged(Box<BoundarySolution>),

    #[error("LP solver hit the iteration limit after {0} pivots")]
    LpIterationLimit(usize),

    #[error("LP reported unbounded; the box-constrained problem cannot be unbounded")]
    LpUnbounded,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{name} = {value}")))
    }
}
