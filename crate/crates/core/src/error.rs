use thiserror::Error;

/// Errors raised by the numerical core.
///
/// The variants are grouped by how a caller is expected to react: domain and
/// precondition errors are bad inputs, cap errors are resource limits, and the
/// remaining numerical variants mean a computed contract was violated.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("state has {found} sites, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("site {site} outside 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("vector has length {found}, operator dimension is {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis would hold {requested} states, limit is {limit}")]
    BasisOverflow { requested: u128, limit: usize },

    #[error("dense solve of dimension {dim} exceeds the cap of {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("hop at site {site} maps {state} outside the basis")]
    PartnerMissing { state: String, site: usize },

    #[error("eigensolver failed: {0}")]
    Solver(String),

    #[error("only {found} levels available, at least {needed} required")]
    InsufficientStatistics { found: usize, needed: usize },

    #[error("norm drift {drift:e} at t = {time} exceeds {limit:e} and renormalization is off")]
    NormDrift { time: f64, drift: f64, limit: f64 },

    #[error("configuration {0} is not in the target sector")]
    SectorMembership(String),

    #[error("eigen-equation residual {residual:e} exceeds {tol:e}")]
    Residual { residual: f64, tol: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by a configured size or memory limit.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::BasisOverflow { .. } | Error::DenseCapExceeded { .. })
    }

    /// True for errors where a numerical guarantee did not hold.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Solver(_)
                | Error::NormDrift { .. }
                | Error::SectorMembership(_)
                | Error::Residual { .. }
                | Error::InsufficientStatistics { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
