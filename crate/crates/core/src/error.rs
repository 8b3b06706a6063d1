use thiserror::Error;

/// Errors raised while building bodies or evaluating functionals.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("malformed body document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("body is not full-dimensional: {0}")]
    NotFullDimensional(String),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("degenerate geodesic: endpoints equal or antipodal")]
    DegenerateArc,

    #[error("directions coincide up to sign (rho = {0})")]
    CoincidentDirections(f64),

    #[error("point is not a vertex of the polygon")]
    NotAVertex,

    #[error("point is not on the boundary (distance {0})")]
    NotOnBoundary(f64),

    #[error("operation requires a {0}")]
    Unsupported(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("inconsistent geometry: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
