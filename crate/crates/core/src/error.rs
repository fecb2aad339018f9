use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value while computing {0}")]
    NonFinite(&'static str),

    #[error("statistical signal ||beta_stat||^2 = {0:e} is zero; confounding strength is undefined")]
    ZeroSignal(f64),

    #[error("causal and confounding parameters are both zero")]
    DegenerateModel,

    #[error("infeasible model: {0}")]
    Infeasible(String),

    #[error("min-norm risk diverges at the interpolation threshold gamma = 1")]
    InterpolationThreshold,

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("malformed model spec: {0}")]
    Spec(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
