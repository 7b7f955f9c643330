//! Cornered/centered classification and the d-separation: the minimum-cost
//! single cut separating a cornered part from the ball center, realized as
//! the plane through the closest boundary point, perpendicular to the segment
//! from the center.

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::polyhedron::ConvexPolyhedron;
use crate::region::Ball;
use crate::tol::TolerancePolicy;
use crate::vec3::Vec3;

/// Which boundary feature carries the closest point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feature {
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

/// Closest point of the polyhedron boundary from a query point.
#[derive(Debug, Clone, Copy)]
pub struct ClosestPointResult {
    pub point: Vec3,
    pub feature: Feature,
    pub distance: f64,
}

/// Placement of the part relative to the ball center.
#[derive(Debug, Clone, Copy)]
pub enum Placement {
    /// The part contains the center (or the center sits on its boundary).
    Centered,
    /// The center is outside; the closest boundary point defines the
    /// d-separation.
    Cornered(ClosestPointResult),
}

impl Placement {
    pub fn is_cornered(&self) -> bool {
        matches!(self, Placement::Cornered(_))
    }
}

/// Classify the part as cornered or centered.
///
/// Preconditions: every vertex strictly inside the ball; violations error
/// with [`Error::NotInsideBall`]. A center within tolerance of the boundary
/// counts as centered (the d-separation degenerates there).
pub fn classify(poly: &ConvexPolyhedron, ball: &Ball, tol: &TolerancePolicy) -> Result<Placement> {
    let eps = tol.len_eps(ball.radius);
    for (vi, v) in poly.vertices().iter().enumerate() {
        let dist = v.distance(ball.center);
        if dist >= ball.radius - eps {
            return Err(Error::NotInsideBall {
                vertex: vi,
                dist,
                radius: ball.radius,
            });
        }
    }
    let inside = (0..poly.faces().len())
        .all(|f| poly.face_plane(f).signed_distance(ball.center) <= eps);
    if inside {
        Ok(Placement::Centered)
    } else {
        Ok(Placement::Cornered(closest_point(poly, ball.center, tol)?))
    }
}

/// Closest point of the boundary from `o`, by the linear scan over vertices,
/// edges (perpendicular foot clamped to the segment) and faces (perpendicular
/// foot accepted only inside the face polygon).
pub fn closest_point(
    poly: &ConvexPolyhedron,
    o: Vec3,
    tol: &TolerancePolicy,
) -> Result<ClosestPointResult> {
    if poly.contains_point(o, tol) {
        return Err(Error::PointInsidePolyhedron);
    }

    let mut best: Option<ClosestPointResult> = None;
    let mut consider = |cand: ClosestPointResult| {
        if best.as_ref().is_none_or(|b| cand.distance < b.distance) {
            best = Some(cand);
        }
    };

    for (vi, &v) in poly.vertices().iter().enumerate() {
        consider(ClosestPointResult {
            point: v,
            feature: Feature::Vertex(vi),
            distance: v.distance(o),
        });
    }

    for (ei, e) in poly.edges().iter().enumerate() {
        let a = poly.vertex(e.v[0]);
        let b = poly.vertex(e.v[1]);
        let ab = b - a;
        let t = (o - a).dot(ab) / ab.norm_sq();
        if t > 0.0 && t < 1.0 {
            let foot = a + ab * t;
            consider(ClosestPointResult {
                point: foot,
                feature: Feature::Edge(ei),
                distance: foot.distance(o),
            });
        }
        // Otherwise the closer end point already covers it via the vertex scan.
    }

    for fi in 0..poly.faces().len() {
        let plane = poly.face_plane(fi);
        let foot = plane.project(o);
        if point_in_face(poly, fi, foot, tol) {
            consider(ClosestPointResult {
                point: foot,
                feature: Feature::Face(fi),
                distance: foot.distance(o),
            });
        }
    }

    Ok(best.expect("non-empty polyhedron"))
}

/// `p` (assumed on the face plane) lies inside the convex face polygon.
fn point_in_face(poly: &ConvexPolyhedron, face: usize, p: Vec3, tol: &TolerancePolicy) -> bool {
    let n = poly.normal(face);
    let cycle = poly.faces()[face].as_slice();
    let eps = tol.len_eps(poly.circumradius());
    for k in 0..cycle.len() {
        let a = poly.vertex(cycle[k]);
        let b = poly.vertex(cycle[(k + 1) % cycle.len()]);
        if (b - a).cross(p - a).dot(n) < -eps {
            return false;
        }
    }
    true
}

/// The d-separation plane for a cornered part: through the closest point `x`,
/// unit normal `(x - o) / |x - o|`. Always a supporting plane of the part,
/// separating it from the center. Its cost on the fresh ball is
/// `pi * (R^2 - |x - o|^2)`.
pub fn d_separation(poly: &ConvexPolyhedron, ball: &Ball, tol: &TolerancePolicy) -> Result<Plane> {
    match classify(poly, ball, tol)? {
        Placement::Centered => Err(Error::CenteredInput),
        Placement::Cornered(cp) => {
            let n = (cp.point - ball.center)
                .normalized()
                .ok_or(Error::CenteredInput)?;
            Ok(Plane::new(n, n.dot(cp.point)))
        }
    }
}
