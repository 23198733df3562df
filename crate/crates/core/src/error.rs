use alloc::string::String;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian (|H - H^dagger|_F = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("eigensolver did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("not a valid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("numerical consistency check failed for {what}: residue {residue:e}")]
    NumericalInconsistency { what: &'static str, residue: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("weighted semi-norm of {which} vanishes ({value:e}); ratio undefined")]
    NullSeminorm { which: &'static str, value: f64 },

    #[error("smallest eigenvalue of the weight is zero; the supremum is unbounded")]
    UnboundedSupremum,

    #[error("all {restarts} optimizer restarts failed")]
    AllRestartsFailed { restarts: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($kind:ident, $($arg:tt)*) => {
        $crate::error::Error::$kind(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
