use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(String),

    #[error("{what} would need {requested} elements, cap is {cap}")]
    SizeLimit {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("numeric failure: {msg} (residual {residual:e})")]
    Numeric { msg: String, residual: f64 },

    #[error("contour integration failed: {0}")]
    Contour(String),

    #[error("s is too close to a pole (|P(s)| = {abs_p:e})")]
    PoleProximity { abs_p: f64 },

    #[error("pole at {re}{im:+}i is not simple (|P'| = {abs_dp:e})")]
    MultiplePole { re: f64, im: f64, abs_dp: f64 },

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("t = {t:e} is below the resolvable limit {limit:e}")]
    Resolution { t: f64, limit: f64 },

    #[error("Mellin integral diverges: Re(s) = {re_s} must exceed {abscissa}")]
    Divergence { re_s: f64, abscissa: f64 },

    #[error("sampled range: {0}")]
    Range(String),

    #[error("fit: {0}")]
    Fit(String),

    #[error("precondition: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
