//! The evolving stock: a ball intersected with an ordered list of
//! half-spaces, with exact cut-cost (new face area) queries.

pub(crate) mod clip2d;
mod sphere_area;

use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::tol::TolerancePolicy;
use crate::vec3::Vec3;

use clip2d::{ClippedDisk, HalfPlane};

/// The initial stock: a ball of given center and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Vec3,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec3, radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        Self { center, radius }
    }

    pub fn unit() -> Self {
        Self::new(Vec3::ZERO, 1.0)
    }
}

/// Stock after zero or more guillotine cuts: `ball ∩ half-spaces`, where the
/// kept side of every stored plane is `signed_distance <= 0`.
///
/// A value type: [`Region::apply_cut`] returns a new region sharing nothing
/// mutable, so read-only sharing across threads is safe.
#[derive(Debug, Clone)]
pub struct Region {
    ball: Ball,
    halfspaces: Vec<Plane>,
}

impl Region {
    pub fn new(ball: Ball) -> Self {
        Self {
            ball,
            halfspaces: Vec::new(),
        }
    }

    /// Rebuild a region from planes that are already oriented with the kept
    /// side non-positive (e.g. when importing a plan).
    pub fn with_halfspaces(ball: Ball, halfspaces: Vec<Plane>) -> Self {
        Self { ball, halfspaces }
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    /// Applied cut planes in insertion order, each oriented with the kept
    /// side non-positive.
    pub fn halfspaces(&self) -> &[Plane] {
        &self.halfspaces
    }

    /// Cost of cutting along `plane`: the exact area of
    /// `plane ∩ interior(region)`.
    ///
    /// The plane-ball section is a disk of radius `sqrt(R^2 - d^2)`; prior
    /// half-spaces clip it as lines in the plane. A plane that only grazes
    /// existing boundary creates no new face and costs 0.
    pub fn cut_cost(&self, plane: &Plane) -> f64 {
        self.section_area(plane, None)
    }

    /// Append a cut, oriented so `keep_point` stays. Returns the new region
    /// and the realized cost (the cost *before* the plane is appended).
    /// A plane missing the region entirely is legal and costs 0.
    pub fn apply_cut(
        &self,
        plane: &Plane,
        keep_point: Vec3,
        tol: &TolerancePolicy,
    ) -> Result<(Region, f64)> {
        let d = plane.signed_distance(keep_point);
        if d.abs() <= tol.len_eps(self.ball.radius) {
            return Err(Error::KeepPointOnPlane { dist: d });
        }
        let oriented = if d < 0.0 { *plane } else { plane.flipped() };
        let cost = self.cut_cost(&oriented);
        let mut halfspaces = self.halfspaces.clone();
        halfspaces.push(oriented);
        Ok((
            Region {
                ball: self.ball,
                halfspaces,
            },
            cost,
        ))
    }

    /// True iff `p` lies in the region within tolerance.
    pub fn contains(&self, p: Vec3, tol: &TolerancePolicy) -> bool {
        let eps = tol.len_eps(self.ball.radius);
        p.distance(self.ball.center) <= self.ball.radius + eps
            && self.halfspaces.iter().all(|h| h.signed_distance(p) <= eps)
    }

    /// Total boundary area: remaining spherical surface plus the planar faces
    /// created by cuts.
    pub fn outer_surface_area(&self) -> f64 {
        self.sphere_surface_area() + self.planar_face_areas().iter().sum::<f64>()
    }

    /// Area of the spherical portion of the boundary.
    pub fn sphere_surface_area(&self) -> f64 {
        sphere_area::sphere_part_area(&self.ball, &self.halfspaces)
    }

    /// Boundary area contributed by each stored half-space, in order.
    /// Coincident planes are grouped so a cut retracing existing boundary
    /// contributes zero (the area sits on the earliest member of the group).
    pub fn planar_face_areas(&self) -> Vec<f64> {
        let n = self.halfspaces.len();
        let group = self.plane_groups();
        let mut areas = vec![0.0; n];
        for i in 0..n {
            if group[i] != i {
                continue;
            }
            let skip: Vec<usize> = (0..n).filter(|&j| group[j] == i).collect();
            areas[i] = self.section_area(&self.halfspaces[i], Some(&skip));
        }
        areas
    }

    /// `group[i]` = earliest half-space index describing the same unoriented
    /// plane as `i`.
    fn plane_groups(&self) -> Vec<usize> {
        let n = self.halfspaces.len();
        let mut group = vec![usize::MAX; n];
        for i in 0..n {
            if group[i] != usize::MAX {
                continue;
            }
            group[i] = i;
            for (j, g) in group.iter_mut().enumerate().skip(i + 1) {
                if *g == usize::MAX && self.same_unoriented_plane(i, j) {
                    *g = i;
                }
            }
        }
        group
    }

    /// Polygonal boundary mesh for visualization: planar faces as clipped
    /// near-circular polygons, the spherical part as subdivided triangles at
    /// the given angular resolution (degrees). Display only; never used in
    /// cost computation.
    pub fn boundary_mesh(&self, angular_res_deg: f64) -> (Vec<Vec3>, Vec<Vec<usize>>) {
        let res = angular_res_deg.max(0.5);
        let mut verts: Vec<Vec3> = Vec::new();
        let mut faces: Vec<Vec<usize>> = Vec::new();
        let push_polygon = |poly: &[Vec3], verts: &mut Vec<Vec3>, faces: &mut Vec<Vec<usize>>| {
            if poly.len() < 3 {
                return;
            }
            let base = verts.len();
            verts.extend_from_slice(poly);
            faces.push((base..base + poly.len()).collect());
        };

        // Planar faces: a circle polygon clipped by the other half-spaces.
        let n = self.halfspaces.len();
        let group = self.plane_groups();
        let segments = (360.0 / res).ceil().max(8.0) as usize;
        for i in 0..n {
            if group[i] != i {
                continue;
            }
            let plane = &self.halfspaces[i];
            let d = plane.signed_distance(self.ball.center);
            let rho_sq = self.ball.radius * self.ball.radius - d * d;
            if rho_sq <= 0.0 {
                continue;
            }
            let rho = rho_sq.sqrt();
            let foot = plane.project(self.ball.center);
            let u = plane.unit_normal.any_orthonormal();
            let v = plane.unit_normal.cross(u);
            let mut poly: Vec<clip2d::P2> = (0..segments)
                .map(|k| {
                    let th = std::f64::consts::TAU * k as f64 / segments as f64;
                    clip2d::P2::new(rho * th.cos(), rho * th.sin())
                })
                .collect();
            for (j, hs) in self.halfspaces.iter().enumerate() {
                if group[j] == i {
                    continue;
                }
                let a = hs.unit_normal.dot(u);
                let b = hs.unit_normal.dot(v);
                let c = hs.signed_distance(foot);
                let len = f64::hypot(a, b);
                if len <= 1e-12 {
                    if c >= -1e-12 * self.ball.radius {
                        poly.clear();
                        break;
                    }
                    continue;
                }
                poly = clip2d::clip_polygon(
                    &poly,
                    &clip2d::HalfPlane {
                        a: a / len,
                        b: b / len,
                        c: c / len,
                    },
                );
                if poly.len() < 3 {
                    break;
                }
            }
            let poly3: Vec<Vec3> = poly
                .iter()
                .map(|p| foot + u * p.x + v * p.y)
                .collect();
            push_polygon(&poly3, &mut verts, &mut faces);
        }

        // Spherical part: subdivided icosahedron, boundary cells clipped flat.
        let depth = ((63.43 / res).log2().ceil().max(0.0) as u32).min(7);
        let ico = crate::shapes::icosahedron(1.0);
        let eps = 1e-9 * self.ball.radius;
        let mut stack: Vec<([Vec3; 3], u32)> = ico
            .faces()
            .iter()
            .map(|f| {
                (
                    [
                        ico.vertex(f[0]).normalized().unwrap(),
                        ico.vertex(f[1]).normalized().unwrap(),
                        ico.vertex(f[2]).normalized().unwrap(),
                    ],
                    0u32,
                )
            })
            .collect();
        while let Some((tri, d)) = stack.pop() {
            if d < depth {
                let ab = (tri[0] + tri[1]).normalized().unwrap();
                let bc = (tri[1] + tri[2]).normalized().unwrap();
                let ca = (tri[2] + tri[0]).normalized().unwrap();
                stack.push(([tri[0], ab, ca], d + 1));
                stack.push(([ab, tri[1], bc], d + 1));
                stack.push(([ca, bc, tri[2]], d + 1));
                stack.push(([ab, bc, ca], d + 1));
                continue;
            }
            let pts: Vec<Vec3> = tri
                .iter()
                .map(|u| self.ball.center + *u * self.ball.radius)
                .collect();
            let fully_inside = pts.iter().all(|p| {
                self.halfspaces
                    .iter()
                    .all(|h| h.signed_distance(*p) <= eps)
            });
            if fully_inside {
                push_polygon(&pts, &mut verts, &mut faces);
                continue;
            }
            let mut poly = pts;
            for hs in &self.halfspaces {
                poly = sphere_area::clip_polygon_3d(&poly, hs);
                if poly.len() < 3 {
                    break;
                }
            }
            push_polygon(&poly, &mut verts, &mut faces);
        }

        (verts, faces)
    }

    fn same_unoriented_plane(&self, i: usize, j: usize) -> bool {
        let a = &self.halfspaces[i];
        let b = &self.halfspaces[j];
        let d = a.unit_normal.dot(b.unit_normal);
        let eps = 1e-12 * self.ball.radius.max(1.0);
        (d > 1.0 - 1e-12 && (a.offset - b.offset).abs() <= eps)
            || (d < -1.0 + 1e-12 && (a.offset + b.offset).abs() <= eps)
    }

    /// Area of `plane ∩ interior(ball ∩ half-spaces)`, optionally ignoring
    /// the half-spaces listed in `skip` (used when measuring the face a
    /// stored half-space itself contributes).
    fn section_area(&self, plane: &Plane, skip: Option<&[usize]>) -> f64 {
        let r = self.ball.radius;
        let d = plane.signed_distance(self.ball.center);
        let rho_sq = r * r - d * d;
        if rho_sq <= 0.0 {
            return 0.0;
        }
        let rho = rho_sq.sqrt();
        let foot = plane.project(self.ball.center);
        let u = plane.unit_normal.any_orthonormal();
        let v = plane.unit_normal.cross(u);

        let mut constraints: Vec<HalfPlane> = Vec::new();
        for (idx, hs) in self.halfspaces.iter().enumerate() {
            if skip.is_some_and(|s| s.contains(&idx)) {
                continue;
            }
            let a = hs.unit_normal.dot(u);
            let b = hs.unit_normal.dot(v);
            let c = hs.signed_distance(foot);
            let len = f64::hypot(a, b);
            if len <= 1e-12 {
                // Half-space boundary (anti)parallel to the query plane: the
                // section is entirely kept, entirely removed, or lies on the
                // existing boundary (no new face).
                if c >= -1e-12 * r {
                    return 0.0;
                }
                continue;
            }
            constraints.push(HalfPlane {
                a: a / len,
                b: b / len,
                c: c / len,
            });
        }

        ClippedDisk::build(rho, &constraints).area()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    #[test]
    fn fresh_ball_disk_areas() {
        let region = Region::new(Ball::unit());
        let plane = Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.5);
        let cost = region.cut_cost(&plane);
        assert!((cost - 0.75 * PI).abs() < 1e-12);

        let region2 = Region::new(Ball::new(Vec3::ZERO, 2.0));
        let plane2 = Plane::new(Vec3::new(0.0, 1.0, 0.0), 1.0);
        assert!((region2.cut_cost(&plane2) - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn clipped_disk_matches_segment_formula() {
        // Unit ball, prior cut x <= 0.5, query plane y = 0.5.
        let region = Region::new(Ball::unit());
        let (region, _) = region
            .apply_cut(&Plane::new(Vec3::new(1.0, 0.0, 0.0), 0.5), Vec3::ZERO, &tol())
            .unwrap();
        let cost = region.cut_cost(&Plane::new(Vec3::new(0.0, 1.0, 0.0), 0.5));
        let rho = 0.75f64.sqrt();
        let seg = rho * rho * (0.5 / rho).acos() - 0.5 * (rho * rho - 0.25).sqrt();
        let expect = PI * rho * rho - seg;
        assert!((cost - expect).abs() < 1e-12, "{cost} vs {expect}");
        assert!((expect - 1.99326).abs() < 1e-5);
    }

    #[test]
    fn apply_cut_orients_and_prices() {
        let region = Region::new(Ball::unit());
        let plane = Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.5);
        let (after, cost) = region.apply_cut(&plane, Vec3::ZERO, &tol()).unwrap();
        assert!((cost - 0.75 * PI).abs() < 1e-12);
        assert!(after.contains(Vec3::new(0.0, 0.0, 0.4), &tol()));
        assert!(!after.contains(Vec3::new(0.0, 0.0, 0.9), &tol()));

        // Same plane again: no new face.
        let (_, second) = after.apply_cut(&plane, Vec3::ZERO, &tol()).unwrap();
        assert_eq!(second, 0.0);
    }

    #[test]
    fn cut_outside_ball_is_free() {
        let region = Region::new(Ball::unit());
        let plane = Plane::new(Vec3::new(0.0, 0.0, 1.0), 2.0);
        let (after, cost) = region.apply_cut(&plane, Vec3::ZERO, &tol()).unwrap();
        assert_eq!(cost, 0.0);
        assert_eq!(after.halfspaces().len(), 1);
    }

    #[test]
    fn keep_point_on_plane_is_rejected() {
        let region = Region::new(Ball::unit());
        let plane = Plane::new(Vec3::new(1.0, 0.0, 0.0), 0.0);
        assert!(matches!(
            region.apply_cut(&plane, Vec3::ZERO, &tol()),
            Err(Error::KeepPointOnPlane { .. })
        ));
    }

    #[test]
    fn outer_surface_area_cases() {
        let tolp = tol();
        let full = Region::new(Ball::unit());
        assert!((full.outer_surface_area() - 4.0 * PI).abs() < 1e-12);

        let (half, _) = full
            .apply_cut(&Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.0), Vec3::new(0.0, 0.0, -0.5), &tolp)
            .unwrap();
        assert!((half.outer_surface_area() - 3.0 * PI).abs() < 1e-12);

        let (zone, _) = full
            .apply_cut(&Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.5), Vec3::ZERO, &tolp)
            .unwrap();
        // Spherical zone 2*pi*R*h, h = 1.5, plus the 0.75*pi disk.
        assert!((zone.outer_surface_area() - 3.75 * PI).abs() < 1e-12);
    }

    #[test]
    fn containment_is_monotone_under_cuts() {
        let tolp = tol();
        let before = Region::new(Ball::unit());
        let (after, _) = before
            .apply_cut(&Plane::new(Vec3::new(1.0, 0.0, 0.0), 0.3), Vec3::ZERO, &tolp)
            .unwrap();
        for p in [
            Vec3::new(0.2, 0.1, -0.4),
            Vec3::new(0.35, 0.0, 0.0),
            Vec3::new(-0.9, 0.0, 0.0),
        ] {
            if after.contains(p, &tolp) {
                assert!(before.contains(p, &tolp));
            }
        }
    }
}
