use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Gamma function pole at z = {re} + {im}i")]
    GammaPole { re: f64, im: f64 },

    #[error("order alpha = {0} is outside (0, 1)")]
    AlphaOutOfRange(f64),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at x = {x}")]
    NonFinite { x: f64, value: f64 },

    #[error("grids are not commensurate: {0}")]
    Incommensurate(String),

    #[error("grid is not aligned with its parent: {0}")]
    Misaligned(String),

    #[error("outside behavior is unspecified but the operator needs tail data")]
    UnspecifiedOutside,

    #[error("window too short: {0}")]
    WindowTooShort(String),

    #[error("operator is singular at x = 0")]
    SingularAtOrigin,

    #[error("expected a grid starting at 0, got left endpoint {0}")]
    NotHalfLine(f64),

    #[error("Re z = {re} lies outside the strip ({lo}, {hi})")]
    StripViolation { re: f64, lo: f64, hi: f64 },

    #[error("divergence: {0}")]
    Divergence(String),

    #[error("insufficient decay: {0}")]
    InsufficientDecay(String),

    #[error("regression failed: {0}")]
    Regression(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}
