//! Error type shared by every module of the crate.

use thiserror::Error;

/// Domain errors. Every variant is a recoverable, reportable condition;
/// internal invariant violations surface as [`Error::Invariant`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// LDLᵀ met a nonpositive pivot at this 1-based index.
    #[error("matrix is not positive definite (pivot {0} is nonpositive)")]
    NotPositiveDefinite(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "unsupported dimension n = {0} (supported: 2..=4; n = 4 requires the experimental switch)"
    )]
    DimensionUnsupported(usize),

    /// A vector configuration does not span Q^n.
    #[error("configuration does not span Q^n")]
    NotSpanning,

    /// A configuration is not the set of minimal vectors of any form.
    #[error("configuration bounds no cell (infeasible)")]
    Infeasible,

    /// The stopping rule was asked about a sublattice that already spans Q^n.
    #[error("sublattice already spans Q^n")]
    AlreadyFull,

    #[error("invalid flag: {0}")]
    InvalidFlag(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    /// An operation is not meaningful for the given input.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("incompatible complexes: {0}")]
    IncompatibleComplexes(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A checked mathematical invariant failed; indicates a bug.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Stable machine-readable tag for JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPositiveDefinite(_) => "NotPositiveDefinite",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::DimensionUnsupported(_) => "DimensionUnsupported",
            Error::NotSpanning => "NotSpanning",
            Error::Infeasible => "Infeasible",
            Error::AlreadyFull => "AlreadyFull",
            Error::InvalidFlag(_) => "InvalidFlag",
            Error::InvalidGroup(_) => "InvalidGroup",
            Error::NotApplicable(_) => "NotApplicable",
            Error::IncompatibleComplexes(_) => "IncompatibleComplexes",
            Error::Parse(_) => "Parse",
            Error::Invariant(_) => "Invariant",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Returns `Err(Error::Invariant)` with a formatted message when `cond` fails.
macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Invariant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
