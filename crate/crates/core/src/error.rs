use thiserror::Error;

use crate::simplify::SimplifiedHull;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("halfspace normal has zero length")]
    ZeroNormal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HullError {
    #[error("need at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("points are affinely dependent (coincident, collinear or coplanar)")]
    DegenerateInput,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("vertex {0} has been removed")]
    DeadVertex(u32),
    #[error("triangulation does not match the one-ring: {0}")]
    BoundaryMismatch(String),
    #[error("removal would leave fewer than 4 vertices")]
    MinimalComplex,
    #[error("input triangles do not form a closed 2-manifold: {0}")]
    NotManifold(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("center lies on (or outside) a halfspace boundary")]
    CenterOnBoundary,
    #[error("dual face plane passes through the origin; primal vertex at infinity")]
    NearInfinitePrimalVertex,
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Error)]
pub enum SimplifyError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("halfspace intersection is empty or flat")]
    Empty,
    #[error("halfspace intersection is unbounded")]
    Unbounded,
    #[error("every remaining removal has infinite cost; stopped at {reached} faces")]
    TargetUnreachable {
        reached: usize,
        partial: Box<SimplifiedHull>,
    },
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl SimplifyError {
    /// Short machine-readable tag used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            SimplifyError::InvalidConfig(_) => "invalid_config",
            SimplifyError::Empty => "empty",
            SimplifyError::Unbounded => "unbounded",
            SimplifyError::TargetUnreachable { .. } => "target_unreachable",
            SimplifyError::Hull(_) => "degenerate_input",
            SimplifyError::Dual(_) => "dual",
            SimplifyError::Mesh(_) => "mesh",
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: only {count} distinct points (need at least 4)")]
    TooFewPoints { path: String, count: usize },
    #[error("unsupported file extension for {0} (expected .obj, .off or .ply)")]
    UnsupportedFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
}

impl From<crate::hull::PlaneSetError> for SimplifyError {
    fn from(e: crate::hull::PlaneSetError) -> Self {
        match e {
            crate::hull::PlaneSetError::Empty => SimplifyError::Empty,
            crate::hull::PlaneSetError::Unbounded => SimplifyError::Unbounded,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("directions {0} and {1} point the same way")]
    ParallelDirections(usize, usize),
    #[error("direction {0} has zero length or is not finite")]
    BadDirection(usize),
    #[error("containment violated by {excess:.3e} (tolerance {tolerance:.3e})")]
    NonContainment { excess: f64, tolerance: f64 },
    #[error("candidate halfspaces do not bound a solid")]
    NotBounded,
    #[error("reference hull has no volume")]
    EmptyReference,
}
