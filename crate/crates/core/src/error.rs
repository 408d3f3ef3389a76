use thiserror::Error;

/// Errors raised by the analytic routines and the numerical oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{quantity} = {value} lies outside {range}")]
    OutOfDomain {
        quantity: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("degenerate denominator in mode-{k} coefficient: |{value:e}| below {threshold:e}")]
    DegenerateDenominator { k: f64, value: f64, threshold: f64 },

    #[error("singular mode-{k} coefficient system (pivot {pivot:e})")]
    SingularSystem { k: u32, pivot: f64 },

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDivergence { iterations: usize, residual: f64 },

    #[error("ill-conditioned fit: {0}")]
    IllConditionedFit(String),

    #[error("perturbation amplitude t = {t} is not admissible (|t|·a must stay below {limit})")]
    InadmissibleAmplitude { t: f64, limit: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors produced by a numerical procedure rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter { .. } | Error::OutOfDomain { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
