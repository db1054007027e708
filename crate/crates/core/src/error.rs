use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("root scan found {found} of {wanted} roots on [{lo}, {hi}]")]
    RootBracket { wanted: usize, found: usize, lo: f64, hi: f64 },

    #[error("kernel at t = {t} needs {required} modes, only {available} built")]
    InsufficientModes { t: f64, required: usize, available: usize },

    #[error("point (t = {t}, x = {x}) is outside the domain")]
    OutOfDomain { t: f64, x: f64 },

    #[error("asymptotics check is Robin-only")]
    NotRobin,

    #[error("{have} modes are too few; need at least {need}")]
    TooFewModes { have: usize, need: usize },

    #[error("covariance matrix is singular (jitter {jitter:e}, condition estimate {condition:e})")]
    Singular { jitter: f64, condition: f64 },

    #[error("negative variance {value:e} beyond roundoff tolerance")]
    NegativeVariance { value: f64 },

    #[error("non-finite solver state at step {step}")]
    NonFinite { step: usize },

    #[error("point (t = {t}, x = {x}) is not on the stored grid")]
    OffGrid { t: f64, x: f64 },

    #[error("ladder rung {epsilon} is below the grid resolution {resolution}")]
    BelowResolution { epsilon: f64, resolution: f64 },

    #[error("fit needs {need} points spanning a factor {span_needed}; got {points} spanning {span}")]
    InsufficientSpan { points: usize, need: usize, span: f64, span_needed: f64 },

    #[error("positivity exclusions {excluded} of {total} exceed the {limit} limit")]
    ExclusionThreshold { excluded: usize, total: usize, limit: f64 },

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Numerical failures (as opposed to bad input) map to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::NegativeVariance { .. }
                | Error::Singular { .. }
                | Error::ExclusionThreshold { .. }
                | Error::RootBracket { .. }
        )
    }
}
