use thiserror::Error;

use crate::sao::Region;

pub type Result<T> = std::result::Result<T, SusyError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SusyError {
    #[error("null operator: all entries of K vanish")]
    NullOperator,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("wrong region: expected {expected}, found {found:?}")]
    WrongRegion { expected: &'static str, found: Region },

    #[error("nilpotent K: only finite Fock solutions; use fock_solve")]
    Nilpotent,

    #[error("no eigenstate with these free parameters (residual {residual:.3e})")]
    NoEigenstate { residual: f64 },

    #[error("truncation overflow; reduce |z0| (needs N > {cap})")]
    TruncationOverflow { cap: usize },

    #[error("truncation order {0} too small (need N >= 2)")]
    TruncationTooSmall(usize),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("no divergence to fit: region {0:?} has bounded uncertainty")]
    NoDivergence(Region),
}

impl SusyError {
    /// True for errors caused by malformed input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(self, SusyError::InvalidParameter(_) | SusyError::TruncationTooSmall(_))
    }
}
