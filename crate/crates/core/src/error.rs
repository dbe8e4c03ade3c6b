use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("degenerate Moebius map (|ad - bc| = {0:e})")]
    DegenerateMap(f64),

    #[error("map has a pole at z = {0}")]
    PoleAtPoint(Complex64),

    #[error("degenerate boundary pair: |z1 - z2| = {0:e}")]
    DegeneratePair(f64),

    #[error("quadrature budget exhausted after {cells} cells (error estimate {abs_err:e})")]
    BudgetExhausted { cells: usize, abs_err: f64 },

    #[error("integrand tail does not decay fast enough to be integrable")]
    NonIntegrableTail,

    #[error("point {0} is not an interior point of the domain")]
    OutsideDomain(Complex64),

    #[error("xi = {0} must lie in the exterior of the domain")]
    XiInsideDomain(Complex64),

    #[error("no conformal chart available for {0}")]
    ChartUnavailable(&'static str),

    #[error("no reflection available for {0}")]
    ReflectionUnavailable(&'static str),

    #[error("reflection is singular at {0}")]
    SingularPoint(Complex64),

    #[error("singular Gram matrix: {0}")]
    SingularGram(String),

    #[error("invalid point set: {0}")]
    InvalidPoints(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
