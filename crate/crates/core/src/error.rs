use thiserror::Error;

/// Errors raised by caplab operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape specification: {0}")]
    InvalidSpec(String),
    #[error("matrix is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{0} is undefined for this shape")]
    Undefined(&'static str),
    #[error("kernel evaluated at r = {0}: Φ(0) = ∞")]
    InfiniteKernel(f64),
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("t = {t} lies outside the flow domain ({lo}, {hi})")]
    OutsideDomain { t: f64, lo: f64, hi: f64 },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("coincident nodes {0} and {1}")]
    CoincidentPoints(usize, usize),
    #[error("energy matrix contains NaN")]
    NotANumber,
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("node matching failed: {0}")]
    NodeMatching(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by the
    /// numerics or the environment.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidSpec(_)
                | Error::InvalidKernel(_)
                | Error::InvalidFlow(_)
                | Error::InvalidGroup(_)
                | Error::InvalidArgument(_)
                | Error::Dimension(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
