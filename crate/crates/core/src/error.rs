use thiserror::Error;

/// Errors raised by the scattering toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid support: radius {radius} exceeds support radius {support_radius}")]
    InvalidSupport { radius: f64, support_radius: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid half-width {half_width} is smaller than the support radius {support_radius}")]
    SupportClipped { half_width: f64, support_radius: f64 },

    #[error("no closed-form Fourier transform for potential kind `{0}`")]
    NoClosedForm(&'static str),

    #[error("kernel evaluated at zero separation")]
    Singularity,

    #[error("symbol denominator {modulus:e} is below the pole threshold")]
    NearPole { modulus: f64 },

    #[error("Born series did not converge after {iterations} iterations (last update {last_update:e})")]
    Divergence { iterations: usize, last_update: f64 },

    #[error("dense solve failed: {0}")]
    Solver(String),

    #[error("no sign change of the eta objective up to eta = {eta_max} (kappa = {kappa})")]
    Bracket { kappa: f64, eta_max: f64 },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("insufficient Fourier coverage: {covered:.3} of the frequency ball (need {required:.2})")]
    InsufficientCoverage { covered: f64, required: f64 },

    #[error("reference norm is zero; relative error undefined (absolute L2 {l2_abs:e}, max {max_abs:e})")]
    UndefinedRelative { l2_abs: f64, max_abs: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
