use thiserror::Error;

use crate::ode::{OdeError, RhsFailure};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("integration failed at x = {x}: {reason}")]
    Integration { x: f64, reason: String },

    /// The Prüfer radius fell below 1e-300; the trajectory is numerically trivial.
    #[error("Pruefer radius collapsed at x = {x}")]
    RadiusCollapse { x: f64 },

    #[error("eigenvalue search failed for n = {n}: {reason}")]
    EigenSearch { n: usize, reason: String },

    #[error("no amplitude bracket for n = {n} within rho in [{rho_min:e}, {rho_max:e}]")]
    NoBracket { n: usize, rho_min: f64, rho_max: f64 },

    #[error("bisection for n = {n} stalled with residual {residual:e}")]
    Stalled { n: usize, residual: f64 },

    #[error("solution for n = {n} has {found} interior zeros")]
    ZeroCount { n: usize, found: usize },
}

impl From<OdeError> for Error {
    fn from(err: OdeError) -> Self {
        match err {
            OdeError::Rhs {
                x,
                failure: RhsFailure::RadiusCollapse,
            } => Error::RadiusCollapse { x },
            OdeError::StepUnderflow { x, .. }
            | OdeError::NonFinite { x }
            | OdeError::TooManySteps { x, .. }
            | OdeError::Rhs { x, .. } => Error::Integration {
                x,
                reason: err.to_string(),
            },
        }
    }
}
