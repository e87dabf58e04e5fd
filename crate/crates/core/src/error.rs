use thiserror::Error;

pub type Result<T> = std::result::Result<T, TrapError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrapError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The evaluation point lies on (or within the guard distance of) a filament.
    #[error("field singularity: point is {distance:e} m from element {element}")]
    Singularity { element: usize, distance: f64 },

    #[error("grid point {index} is singular (element {element})")]
    SingularGridPoint { index: usize, element: usize },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("gradient tensor is not symmetric: relative asymmetry {0:e}")]
    Asymmetry(f64),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("fit failed after {iterations} iterations (residual {residual:e})")]
    FitFailure { iterations: usize, residual: f64 },
}
