use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric positive definite (pivot {pivot:e} at index {index})")]
    NotSpd { index: usize, pivot: f64 },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("indicators leave the regime of real, ordered roots (discriminant {discriminant:e})")]
    ComplexRoots { discriminant: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dense order {order} exceeds the budget of {budget}")]
    BudgetExceeded { order: usize, budget: usize },

    #[error("degenerate spectral interval [{lo}, {hi}]")]
    DegenerateInterval { lo: f64, hi: f64 },

    #[error("required measurement `{0}` was not supplied")]
    MissingMeasurement(&'static str),

    #[error("coupling block C is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("cannot hit target interval [{lo}, {hi}] for a spectrum in [{spec_lo}, {spec_hi}]")]
    TargetInfeasible { lo: f64, hi: f64, spec_lo: f64, spec_hi: f64 },

    #[error("condition number {cond:e} exceeds the limit {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("serialization: {0}")]
    Serde(String),
}

impl Error {
    /// Short machine-readable tag, used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSpd { .. } => "NotSPD",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ComplexRoots { .. } => "ComplexRoots",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::DegenerateInterval { .. } => "DegenerateInterval",
            Error::MissingMeasurement(_) => "MissingMeasurement",
            Error::NotSquare { .. } => "NotSquare",
            Error::TargetInfeasible { .. } => "TargetInfeasible",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::InvalidSystem(_) => "InvalidSystem",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
            Error::Serde(_) => "Serde",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
