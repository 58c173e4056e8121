use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature-failure: error estimate {estimate:e} exceeds tolerance {tol:e}")]
    QuadratureFailure { estimate: f64, tol: f64 },
    #[error("domain-error: {0}")]
    Domain(String),
    #[error("resolution-error: {0}")]
    Resolution(String),
    #[error("degenerate-input: {0}")]
    DegenerateInput(String),
    #[error("chart-error: {0}")]
    Chart(String),
    #[error("lattice-error: {0}")]
    Lattice(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
