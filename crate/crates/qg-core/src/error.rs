use core::fmt;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    InvalidInput(&'static str),
    /// A requested grid or truncation exceeds the configured maximum.
    Resource { what: &'static str, requested: usize, max: usize },
    /// Adaptive quadrature stopped before reaching the tolerance.
    NoConvergence { achieved: f64, target: f64 },
    /// Data reaches the square-root branch locus h = -1.
    BranchLocus { mass: f64 },
    /// A symbol's kernel leaves the injectivity domain of exp.
    Support { radius: f64, limit: f64 },
    /// Content beyond the declared band limit.
    BandOverflow { label: i64, max: i64 },
    /// A positive spectrum value fell below the conditioning floor.
    Conditioning { value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Resource { what, requested, max } => {
                write!(f, "{what}: requested {requested} exceeds maximum {max}")
            }
            Error::NoConvergence { achieved, target } => {
                write!(f, "quadrature did not converge: error {achieved:e} > {target:e}")
            }
            Error::BranchLocus { mass } => {
                write!(f, "kernel mass {mass:e} on the square-root branch locus")
            }
            Error::Support { radius, limit } => {
                write!(f, "kernel support radius {radius} outside injectivity radius {limit}")
            }
            Error::BandOverflow { label, max } => {
                write!(f, "irrep label {label} exceeds band limit {max}")
            }
            Error::Conditioning { value } => write!(f, "spectrum value {value:e} too small"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
