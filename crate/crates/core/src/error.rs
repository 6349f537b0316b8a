use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {bound:.3e})")]
    NotHermitian { defect: f64, bound: f64 },

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("operators do not commute (residual {residual:.3e} exceeds {bound:.3e})")]
    NotCommuting { residual: f64, bound: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("{0}")]
    Validation(ValidationErrors),

    #[error("{0}")]
    Parse(String),

    #[error(
        "propagators are only available at t = 0 and t = {instant}, requested t = {requested}"
    )]
    TimeNotAvailable { instant: f64, requested: f64 },

    #[error("state is not separable; no product decomposition exists")]
    NotSeparable,

    #[error("minor precondition failed: {0}")]
    PreconditionFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One failed model invariant, addressed by a field path such as `v[2]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationErrors {
    pub errors: Vec<Violation>,
}

impl ValidationErrors {
    pub fn push(&mut self, path: impl Into<String>, reason: impl Into<String>) {
        self.errors.push(Violation {
            path: path.into(),
            reason: reason.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.errors.iter().map(|v| v.path.as_str())
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model validation failed")?;
        for v in &self.errors {
            write!(f, "\n  {}: {}", v.path, v.reason)?;
        }
        Ok(())
    }
}
