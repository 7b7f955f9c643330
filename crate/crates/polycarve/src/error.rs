use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// The projection direction is parallel to a face plane.
    #[error("degenerate projection: direction parallel to face {face}")]
    DegenerateProjection { face: usize },

    /// `apply_cut` needs the keep point strictly off the cut plane.
    #[error("keep point lies on the cut plane (signed distance {dist:e})")]
    KeepPointOnPlane { dist: f64 },

    /// The polyhedron must sit strictly inside the stock ball.
    #[error("vertex {vertex} at distance {dist} is not strictly inside the ball (radius {radius})")]
    NotInsideBall { vertex: usize, dist: f64, radius: f64 },

    /// Closest-point queries require the query point outside the body.
    #[error("query point lies inside the polyhedron")]
    PointInsidePolyhedron,

    /// A d-separation only exists for cornered placements.
    #[error("instance is centered; d-separation needs a cornered placement")]
    CenteredInput,

    /// Splitting a face set needs at least two faces.
    #[error("face set has {len} faces, need at least 2")]
    FaceSetTooSmall { len: usize },

    /// Edge cut plane is undefined when the edge is parallel to the zone direction.
    #[error("edge {edge} is parallel to the zone direction")]
    DegenerateCross { edge: usize },

    /// Flat or otherwise unusable geometry.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Convex hull construction needs four non-coplanar points.
    #[error("degenerate hull: fewer than four non-coplanar points")]
    DegenerateHull,

    /// Structured-text parse failure with source location.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Mesh fails the convexity check.
    #[error("mesh is not convex: {violations} vertex/face violations, worst depth {worst:e}")]
    NotConvex { violations: usize, worst: f64 },

    /// Mesh topology is broken (non-manifold edges, bad indices, ...).
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// A replayed plan failed one of its certification checks.
    #[error("certification failed: {0}")]
    Certification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
