use thiserror::Error;

/// Errors raised by the geometry kernel, the bundle metrics and the Sobolev layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A vector handed to a manifold operation is not tangent at its base point.
    #[error("vector is not tangent at the base point (normal residual {residual:.3e})")]
    NotTangent { residual: f64 },

    /// A point fails the membership predicate of its manifold.
    #[error("point is not on the manifold: {0}")]
    NotOnManifold(String),

    /// A flat-domain operation produced a point outside the domain bounds.
    #[error("point leaves the domain: {0}")]
    OutOfDomain(String),

    /// Antipodal pair on a sphere: minimizing geodesic not unique.
    #[error("antipodal points: minimizing geodesic is not unique")]
    Singularity,

    /// Neighbouring grid values are too far apart to difference.
    #[error("grid too coarse: neighbours of node {node} are (nearly) antipodal")]
    Resolution { node: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The caller broke a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The λ = 0 metric evaluated on a vertical vector over the zero section.
    #[error("degenerate metric: λ = 0 with vertical motion over the zero section")]
    DegenerateMetric,

    /// Two sampled maps live on different domains, grids or targets.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
