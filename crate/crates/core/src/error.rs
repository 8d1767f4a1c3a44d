use thiserror::Error;

use crate::metric::AxiomReport;

/// Errors raised by the core library.
///
/// Mathematical failures of a contraction condition are *not* errors: they are
/// reported as failing [`Certificate`](crate::certify::Certificate)s. The
/// variants here cover malformed input and violated preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("distance matrix is not a metric ({} violation(s))", .0.violations.len())]
    NotAMetric(AxiomReport),

    #[error("potential undefined at d = {distance}: gauge value {value} is not below d")]
    PotentialUndefined { distance: f64, value: f64 },

    #[error("reduction failed at t = {t}: {reason}")]
    Reduction { t: f64, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "selection bound violated at step {step}: d({from}, {to}) = {step_distance} exceeds bound {bound}"
    )]
    SelectionBound {
        step: usize,
        from: usize,
        to: usize,
        step_distance: f64,
        bound: f64,
    },

    #[error("non-finite value at state {state}, decision {decision}")]
    NonFinite { state: usize, decision: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
