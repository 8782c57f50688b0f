use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular value decomposition did not converge")]
    SvdNotConverged,

    #[error("matrix or vector has zero size")]
    Empty,

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("matrix does not have full column rank (rank {rank}, columns {cols})")]
    RankDeficient { rank: usize, cols: usize },

    #[error("all {0} rows were flagged as outliers; nothing left to estimate from")]
    AllOutliers(usize),

    #[error("infeasible at this t: no support of size <= {max_support} brings the residual within {t}")]
    Infeasible { t: f64, max_support: usize },

    #[error("support enumeration needs {count} candidates, above the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
