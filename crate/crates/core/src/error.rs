use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("time {t} is not on the grid with step {step}")]
    OffGrid { t: f64, step: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("interval [{from}, {to}] is not covered (available up to {available})")]
    Uncovered { from: f64, to: f64, available: f64 },

    #[error("circulant embedding has a negative eigenvalue ({value:e}) at index {index}")]
    NegativeEmbedding { index: usize, value: f64 },

    #[error("solution overflow at t = {t}: |u| + |u[1]| exceeded 1e300")]
    Overflow { t: f64 },

    #[error("potential is not confining: {0}")]
    NonConfining(String),

    #[error("could not bracket {wanted} eigenvalues: {reason}")]
    BracketFailure { wanted: usize, reason: String },

    #[error("time mismatch: {0} vs {1}")]
    TimeMismatch(f64, f64),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NegativeEmbedding { .. } | Error::Overflow { .. } | Error::BracketFailure { .. }
        )
    }
}
