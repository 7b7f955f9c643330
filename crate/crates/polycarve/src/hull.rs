//! Incremental 3D convex hull.
//!
//! Used by the random instance generators and as the construction oracle for
//! validation tests. Assumes reasonably general position (the generators
//! sample points on a sphere); exact-arithmetic robustness is out of scope.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::polyhedron::ConvexPolyhedron;
use crate::vec3::Vec3;

#[derive(Clone, Copy)]
struct HullFace {
    v: [usize; 3],
    normal: Vec3, // not unit
    offset: f64,
    alive: bool,
}

impl HullFace {
    fn new(a: usize, b: usize, c: usize, pts: &[Vec3]) -> Self {
        let n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
        HullFace {
            v: [a, b, c],
            normal: n,
            offset: n.dot(pts[a]),
            alive: true,
        }
    }

    fn sees(&self, p: Vec3, eps: f64) -> bool {
        // eps scales with the face normal magnitude so the test is
        // invariant under uniform scaling.
        self.normal.dot(p) - self.offset > eps * self.normal.norm()
    }
}

/// Convex hull of a point set, as a validated polyhedron with triangular
/// faces. Only hull vertices are kept (indices are remapped).
pub fn convex_hull(points: &[Vec3]) -> Result<ConvexPolyhedron> {
    if points.len() < 4 {
        return Err(Error::DegenerateHull);
    }
    let scale = points
        .iter()
        .map(|p| p.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let eps = 1e-12 * scale;

    let (i0, i1, i2, i3) = initial_simplex(points, eps)?;

    let mut faces: Vec<HullFace> = Vec::new();
    let mut edge_to_face: HashMap<(usize, usize), usize> = HashMap::new();

    let add_face = |faces: &mut Vec<HullFace>,
                        edge_to_face: &mut HashMap<(usize, usize), usize>,
                        a: usize,
                        b: usize,
                        c: usize| {
        let id = faces.len();
        faces.push(HullFace::new(a, b, c, points));
        edge_to_face.insert((a, b), id);
        edge_to_face.insert((b, c), id);
        edge_to_face.insert((c, a), id);
        id
    };

    // Initial tetrahedron, all faces outward.
    for (a, b, c, d) in [
        (i0, i1, i2, i3),
        (i0, i2, i3, i1),
        (i0, i3, i1, i2),
        (i1, i3, i2, i0),
    ] {
        let f = HullFace::new(a, b, c, points);
        let (a, b, c) = if f.normal.dot(points[d]) - f.offset > 0.0 {
            (a, c, b)
        } else {
            (a, b, c)
        };
        add_face(&mut faces, &mut edge_to_face, a, b, c);
    }

    let in_simplex = [i0, i1, i2, i3];
    for (pi, &p) in points.iter().enumerate() {
        if in_simplex.contains(&pi) {
            continue;
        }
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.sees(p, eps))
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            continue;
        }
        // Horizon: directed edges of visible faces whose twin face is hidden.
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &fi in &visible {
            let f = faces[fi];
            for k in 0..3 {
                let a = f.v[k];
                let b = f.v[(k + 1) % 3];
                let twin = edge_to_face.get(&(b, a)).copied();
                let twin_visible = twin.is_some_and(|t| faces[t].alive && faces[t].sees(p, eps));
                if !twin_visible {
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &visible {
            let f = faces[fi].v;
            faces[fi].alive = false;
            for k in 0..3 {
                edge_to_face.remove(&(f[k], f[(k + 1) % 3]));
            }
        }
        // Chain the horizon into a loop so new faces are created in order.
        let next: HashMap<usize, (usize, usize)> =
            horizon.iter().map(|&(a, b)| (a, (a, b))).collect();
        if next.len() != horizon.len() {
            return Err(Error::DegenerateGeometry(
                "hull horizon is not a simple cycle".into(),
            ));
        }
        let start = horizon
            .iter()
            .map(|&(a, _)| a)
            .min()
            .expect("nonempty horizon");
        let mut at = start;
        for _ in 0..horizon.len() {
            let &(a, b) = next
                .get(&at)
                .ok_or_else(|| Error::DegenerateGeometry("broken hull horizon".into()))?;
            add_face(&mut faces, &mut edge_to_face, a, b, pi);
            at = b;
        }
        if at != start {
            return Err(Error::DegenerateGeometry("hull horizon did not close".into()));
        }
    }

    // Collect alive faces, remap to the used vertex subset.
    let mut used: Vec<usize> = Vec::new();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut out_faces: Vec<Vec<usize>> = Vec::new();
    for f in faces.iter().filter(|f| f.alive) {
        let mut cycle = Vec::with_capacity(3);
        for &vi in &f.v {
            let id = *remap.entry(vi).or_insert_with(|| {
                used.push(vi);
                used.len() - 1
            });
            cycle.push(id);
        }
        out_faces.push(cycle);
    }
    let out_vertices: Vec<Vec3> = used.iter().map(|&i| points[i]).collect();
    ConvexPolyhedron::from_parts(out_vertices, out_faces)
}

fn initial_simplex(points: &[Vec3], eps: f64) -> Result<(usize, usize, usize, usize)> {
    let i0 = (0..points.len())
        .min_by(|&a, &b| {
            let pa = points[a];
            let pb = points[b];
            (pa.x, pa.y, pa.z)
                .partial_cmp(&(pb.x, pb.y, pb.z))
                .expect("finite coordinates")
        })
        .expect("nonempty");
    let i1 = (0..points.len())
        .max_by(|&a, &b| {
            points[a]
                .distance(points[i0])
                .total_cmp(&points[b].distance(points[i0]))
        })
        .expect("nonempty");
    if points[i1].distance(points[i0]) <= eps {
        return Err(Error::DegenerateHull);
    }
    let dir = points[i1] - points[i0];
    let i2 = (0..points.len())
        .max_by(|&a, &b| {
            let da = dir.cross(points[a] - points[i0]).norm();
            let db = dir.cross(points[b] - points[i0]).norm();
            da.total_cmp(&db)
        })
        .expect("nonempty");
    if dir.cross(points[i2] - points[i0]).norm() <= eps * dir.norm() {
        return Err(Error::DegenerateHull);
    }
    let n = dir.cross(points[i2] - points[i0]);
    let i3 = (0..points.len())
        .max_by(|&a, &b| {
            let da = (n.dot(points[a]) - n.dot(points[i0])).abs();
            let db = (n.dot(points[b]) - n.dot(points[i0])).abs();
            da.total_cmp(&db)
        })
        .expect("nonempty");
    if (n.dot(points[i3]) - n.dot(points[i0])).abs() <= eps * n.norm() {
        return Err(Error::DegenerateHull);
    }
    Ok((i0, i1, i2, i3))
}

/// `n` points uniformly distributed on the sphere of the given radius,
/// deterministic per seed.
pub fn sphere_points(n: usize, radius: f64, seed: u64) -> Vec<Vec3> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        // Marsaglia (1972): uniform on the unit sphere.
        let u: f64 = rng.random_range(-1.0..1.0);
        let v: f64 = rng.random_range(-1.0..1.0);
        let s = u * u + v * v;
        if s >= 1.0 || s == 0.0 {
            continue;
        }
        let f = 2.0 * (1.0 - s).sqrt();
        pts.push(Vec3::new(u * f, v * f, 1.0 - 2.0 * s) * radius);
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::TolerancePolicy;

    #[test]
    fn hull_of_cube_corners() {
        let pts = crate::shapes::cube_vertices(1.0);
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices().len(), 8);
        assert!((h.volume() - 8.0).abs() < 1e-9);
        assert!(h.validate(&TolerancePolicy::default()).is_valid());
    }

    #[test]
    fn hull_drops_interior_points() {
        let mut pts = crate::shapes::cube_vertices(1.0);
        pts.push(Vec3::new(0.1, 0.0, -0.2));
        pts.push(Vec3::ZERO);
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices().len(), 8);
    }

    #[test]
    fn random_sphere_hulls_validate() {
        let tol = TolerancePolicy::default();
        for seed in [1u64, 7, 42] {
            let pts = sphere_points(100, 0.5, seed);
            let h = convex_hull(&pts).unwrap();
            let report = h.validate(&tol);
            assert!(report.is_valid(), "seed {seed}: {report:?}");
            // Points on a sphere: all of them are hull vertices.
            assert_eq!(h.vertices().len(), 100);
            assert!(report.euler_ok());
        }
    }

    #[test]
    fn coplanar_points_are_rejected() {
        let pts: Vec<Vec3> = (0..12)
            .map(|i| Vec3::new(i as f64, (i * i % 7) as f64, 0.0))
            .collect();
        assert!(matches!(convex_hull(&pts), Err(Error::DegenerateHull)));
    }

    #[test]
    fn sphere_points_deterministic() {
        assert_eq!(sphere_points(50, 0.5, 9), sphere_points(50, 0.5, 9));
    }
}
