use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument violates its domain.
    #[error("invalid `{name}`: {reason}")]
    Domain { name: String, reason: String },

    /// The steady state is not unique for these parameters.
    #[error("singular generator: {0}")]
    SingularRegime(String),

    /// The balanced collective regime needs the initial |d> population.
    #[error("initial |d> population (pdd0) is required when gamma_a = gamma_b = gamma")]
    MissingInitialCondition,

    /// A density matrix failed its trace or positivity checks.
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("time step {dt} exceeds the stability bound {bound}")]
    StepSize { dt: f64, bound: f64 },

    #[error("integration produced a non-finite value at t = {t}")]
    NonFinite { t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Domain {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by the caller's inputs rather than I/O.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Json(_) | Error::Csv(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
