use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("root iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("gradient weights sum to zero")]
    ZeroAlphaSum,

    #[error("invalid sector: need L >= m > 0, got m = {m}, L = {l}")]
    BadSector { m: f64, l: f64 },

    #[error("degenerate sector m = L = {0}: optimal rate is 0")]
    DegenerateSector(f64),

    #[error("length mismatch: k = {k} needs {expected_alpha} alphas and {expected_beta} betas, got {alpha} and {beta}")]
    LengthMismatch {
        k: usize,
        expected_alpha: usize,
        expected_beta: usize,
        alpha: usize,
        beta: usize,
    },

    #[error("leading-term cancellation residual {residual:e} exceeds precision budget")]
    IllConditioned { residual: f64 },

    #[error("synthesis routes disagree (relative difference {rel:e})")]
    RouteMismatch { rel: f64 },

    #[error("point {re} + {im}i lies on the branch cut of theta")]
    DomainViolation { re: f64, im: f64 },

    #[error("theta inverse is singular at {re} + {im}i")]
    Singularity { re: f64, im: f64 },

    #[error("perturbations must be positive and pairwise distinct")]
    BadPerturbations,

    #[error("trajectory diverged at step {step} (error {error:e})")]
    Divergence { step: usize, error: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parameters do not satisfy Condition 1 at order {n}")]
    Condition1Violated { n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by bad user input (as opposed to numerical
    /// failure inside the toolkit).
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::NonConvergence { .. }
                | Error::IllConditioned { .. }
                | Error::RouteMismatch { .. }
                | Error::Divergence { .. }
        )
    }
}
