//! Canonical solids used by the instance generators and across tests.

use crate::polyhedron::ConvexPolyhedron;
use crate::vec3::Vec3;

pub fn cube_vertices(half: f64) -> Vec<Vec3> {
    let h = half;
    vec![
        Vec3::new(-h, -h, -h),
        Vec3::new(h, -h, -h),
        Vec3::new(h, h, -h),
        Vec3::new(-h, h, -h),
        Vec3::new(-h, -h, h),
        Vec3::new(h, -h, h),
        Vec3::new(h, h, h),
        Vec3::new(-h, h, h),
    ]
}

pub fn cube_faces() -> Vec<Vec<usize>> {
    vec![
        vec![0, 3, 2, 1], // z = -h
        vec![4, 5, 6, 7], // z = +h
        vec![0, 1, 5, 4], // y = -h
        vec![2, 3, 7, 6], // y = +h
        vec![0, 4, 7, 3], // x = -h
        vec![1, 2, 6, 5], // x = +h
    ]
}

/// Axis-aligned cube `[-half, half]^3`.
pub fn cube(half: f64) -> ConvexPolyhedron {
    ConvexPolyhedron::from_parts(cube_vertices(half), cube_faces()).expect("cube is a valid mesh")
}

/// Axis-aligned box `[lo, hi]` per coordinate.
pub fn aligned_box(lo: Vec3, hi: Vec3) -> ConvexPolyhedron {
    let c = (lo + hi) * 0.5;
    let h = (hi - lo) * 0.5;
    let verts = cube_vertices(1.0)
        .into_iter()
        .map(|v| Vec3::new(c.x + v.x * h.x, c.y + v.y * h.y, c.z + v.z * h.z))
        .collect();
    ConvexPolyhedron::from_parts(verts, cube_faces()).expect("box is a valid mesh")
}

/// Regular tetrahedron on alternating cube corners `(+-half, +-half, +-half)`
/// with an even number of minus signs; edge length `half * 2 * sqrt(2)`.
pub fn regular_tetrahedron(half: f64) -> ConvexPolyhedron {
    let h = half;
    let verts = vec![
        Vec3::new(h, h, h),
        Vec3::new(h, -h, -h),
        Vec3::new(-h, h, -h),
        Vec3::new(-h, -h, h),
    ];
    let faces = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 2, 3], vec![1, 3, 2]];
    ConvexPolyhedron::from_parts(verts, faces).expect("tetrahedron is a valid mesh")
}

/// Regular octahedron with vertices at distance `r` along the axes.
pub fn octahedron(r: f64) -> ConvexPolyhedron {
    let verts = vec![
        Vec3::new(r, 0.0, 0.0),
        Vec3::new(-r, 0.0, 0.0),
        Vec3::new(0.0, r, 0.0),
        Vec3::new(0.0, -r, 0.0),
        Vec3::new(0.0, 0.0, r),
        Vec3::new(0.0, 0.0, -r),
    ];
    let faces = vec![
        vec![0, 2, 4],
        vec![2, 1, 4],
        vec![1, 3, 4],
        vec![3, 0, 4],
        vec![2, 0, 5],
        vec![1, 2, 5],
        vec![3, 1, 5],
        vec![0, 3, 5],
    ];
    ConvexPolyhedron::from_parts(verts, faces).expect("octahedron is a valid mesh")
}

/// Regular icosahedron scaled to circumradius `r`.
pub fn icosahedron(r: f64) -> ConvexPolyhedron {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let s = r / (1.0 + phi * phi).sqrt();
    let a = s;
    let b = s * phi;
    let verts = vec![
        Vec3::new(-a, b, 0.0),
        Vec3::new(a, b, 0.0),
        Vec3::new(-a, -b, 0.0),
        Vec3::new(a, -b, 0.0),
        Vec3::new(0.0, -a, b),
        Vec3::new(0.0, a, b),
        Vec3::new(0.0, -a, -b),
        Vec3::new(0.0, a, -b),
        Vec3::new(b, 0.0, -a),
        Vec3::new(b, 0.0, a),
        Vec3::new(-b, 0.0, -a),
        Vec3::new(-b, 0.0, a),
    ];
    let faces: Vec<Vec<usize>> = vec![
        vec![0, 11, 5],
        vec![0, 5, 1],
        vec![0, 1, 7],
        vec![0, 7, 10],
        vec![0, 10, 11],
        vec![1, 5, 9],
        vec![5, 11, 4],
        vec![11, 10, 2],
        vec![10, 7, 6],
        vec![7, 1, 8],
        vec![3, 9, 4],
        vec![3, 4, 2],
        vec![3, 2, 6],
        vec![3, 6, 8],
        vec![3, 8, 9],
        vec![4, 9, 5],
        vec![2, 4, 11],
        vec![6, 2, 10],
        vec![8, 6, 7],
        vec![9, 8, 1],
    ];
    ConvexPolyhedron::from_parts(verts, faces).expect("icosahedron is a valid mesh")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol::TolerancePolicy;

    #[test]
    fn canonical_shapes_validate() {
        let tol = TolerancePolicy::default();
        for (p, v, e, f) in [
            (cube(0.5), 8, 12, 6),
            (regular_tetrahedron(0.5), 4, 6, 4),
            (octahedron(0.5), 6, 12, 8),
            (icosahedron(0.5), 12, 30, 20),
        ] {
            let r = p.validate(&tol);
            assert!(r.is_valid());
            assert_eq!((r.vertex_count, r.edge_count, r.face_count), (v, e, f));
        }
    }

    #[test]
    fn cube_volume_and_area() {
        let c = cube(1.0);
        assert!((c.volume() - 8.0).abs() < 1e-12);
        assert!((c.surface_area() - 24.0).abs() < 1e-12);
        assert!((c.face_area(0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn parity_tetrahedron_edge_and_volume() {
        // Half = 0.5: edge sqrt(2), volume = cube(1) minus 4 corner tetrahedra = 1/3.
        let t = regular_tetrahedron(0.5);
        let e = t.edges()[0];
        let len = t.vertex(e.v[0]).distance(t.vertex(e.v[1]));
        assert!((len - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((t.volume() - 1.0 / 3.0).abs() < 1e-12);
    }
}
