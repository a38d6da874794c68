use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {operation}: {reason}")]
    Domain {
        operation: &'static str,
        reason: String,
    },
    /// The threshold sits where no finite optimal noise exists.
    #[error("no finite critical point in {operation}: {reason}")]
    NoCriticalPoint {
        operation: &'static str,
        reason: String,
    },
    /// A root or extremum solver could not bracket or converge.
    #[error("solver failure in {operation}: {reason} (residual {residual:e})")]
    Solver {
        operation: &'static str,
        reason: String,
        residual: f64,
    },
    /// The Fock-space truncation is too small for the requested state.
    #[error("cutoff too small in {operation}: dim {dim}, defect {defect:e}")]
    Cutoff {
        operation: &'static str,
        dim: usize,
        defect: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(operation: &'static str, reason: impl Into<String>) -> Result<T> {
    Err(Error::Domain {
        operation,
        reason: reason.into(),
    })
}

impl Error {
    /// True for failures of numeric machinery rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Solver { .. } | Error::Cutoff { .. })
    }
}
