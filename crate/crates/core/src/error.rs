use thiserror::Error;

/// Errors raised by the cone stability toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("profile stays positive up to t = {t_max}: no free boundary angle found")]
    NoZeroFound { t_max: f64 },

    #[error("degenerate boundary: {0}")]
    DegenerateBoundary(String),

    #[error("non-smooth point: {0}")]
    NonSmoothPoint(String),

    #[error("angle {t} outside the open cross-section (0, {theta_star})")]
    OutOfDomain { t: f64, theta_star: f64 },

    #[error("every sample point was excluded by the smoothness guard")]
    AllPointsGuarded,

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("cone is unstable (Lambda = {lambda} > {threshold}); no positive solution exists")]
    UnstableCone { lambda: f64, threshold: f64 },

    #[error("cone is not unstable (Lambda = {lambda} <= {threshold} + tol); no certificate exists")]
    StableCone { lambda: f64, threshold: f64 },

    #[error("certificate margin too small: {0}")]
    MarginTooSmall(String),

    #[error("identity violated: {0}")]
    IdentityViolated(String),

    #[error("consistency violation: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    ///
    /// 1 usage, 2 numerical failure, 3 invariant or consistency violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Io(_) | Error::Json(_) => 1,
            Error::NoZeroFound { .. }
            | Error::NonSmoothPoint(_)
            | Error::OutOfDomain { .. }
            | Error::AllPointsGuarded
            | Error::NoConvergence(_)
            | Error::MarginTooSmall(_) => 2,
            Error::DegenerateBoundary(_)
            | Error::UnstableCone { .. }
            | Error::StableCone { .. }
            | Error::IdentityViolated(_)
            | Error::Consistency(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
