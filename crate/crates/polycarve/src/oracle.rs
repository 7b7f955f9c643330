//! Independent brute-force validators: Monte Carlo area/volume estimators,
//! dense boundary sampling for closest points, and an exhaustive rotation
//! grid for bounding boxes. These ground the exact kernels in tests and in
//! `bench --verify`; nothing on the planning path depends on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::boxing::OrientedBox;
use crate::plane::Plane;
use crate::polyhedron::ConvexPolyhedron;
use crate::region::Region;
use crate::tol::TolerancePolicy;
use crate::vec3::Vec3;

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    /// |value - reference| within `k` standard errors (with a tiny absolute
    /// floor for exact-zero cases).
    pub fn agrees_with(&self, reference: f64, k: f64) -> bool {
        (self.value - reference).abs() <= k * self.std_error + 1e-12
    }
}

const SHARD: u64 = 1 << 14;

fn shard_seed(seed: u64, shard: u64) -> u64 {
    // splitmix64 step keyed by the shard index.
    let mut z = seed ^ shard.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Hit-fraction estimate over `samples` draws, sharded so the result is
/// deterministic for a given seed regardless of thread scheduling.
fn mc_fraction(samples: u64, seed: u64, hit: impl Fn(&mut ChaCha8Rng) -> bool + Sync) -> (f64, u64) {
    let shards: Vec<u64> = (0..samples.div_ceil(SHARD)).collect();
    let hits: u64 = shards
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(shard_seed(seed, s));
            let count = SHARD.min(samples - s * SHARD);
            let mut h = 0u64;
            for _ in 0..count {
                if hit(&mut rng) {
                    h += 1;
                }
            }
            h
        })
        .sum();
    (hits as f64 / samples as f64, samples)
}

fn estimate(measure: f64, frac: f64, samples: u64) -> McEstimate {
    McEstimate {
        value: measure * frac,
        std_error: measure * (frac * (1.0 - frac) / samples as f64).sqrt(),
        samples,
    }
}

/// Monte Carlo area of `plane ∩ region`: uniform samples on the plane-ball
/// disk, counting those that satisfy every half-space.
pub fn mc_plane_region_area(region: &Region, plane: &Plane, samples: u64, seed: u64) -> McEstimate {
    assert!(samples >= 10_000, "need at least 1e4 samples");
    let ball = *region.ball();
    let d = plane.signed_distance(ball.center);
    let rho_sq = ball.radius * ball.radius - d * d;
    if rho_sq <= 0.0 {
        return McEstimate {
            value: 0.0,
            std_error: 0.0,
            samples,
        };
    }
    let rho = rho_sq.sqrt();
    let foot = plane.project(ball.center);
    let u = plane.unit_normal.any_orthonormal();
    let v = plane.unit_normal.cross(u);
    let halfspaces = region.halfspaces().to_vec();

    let (frac, n) = mc_fraction(samples, seed, |rng| {
        let r = rho * rng.random::<f64>().sqrt();
        let th = rng.random::<f64>() * std::f64::consts::TAU;
        let p = foot + u * (r * th.cos()) + v * (r * th.sin());
        halfspaces.iter().all(|h| h.signed_distance(p) <= 0.0)
    });
    estimate(std::f64::consts::PI * rho_sq, frac, n)
}

/// Monte Carlo region volume by rejection sampling in the ball's bounding
/// cube.
pub fn mc_region_volume(region: &Region, samples: u64, seed: u64) -> McEstimate {
    assert!(samples >= 10_000, "need at least 1e4 samples");
    let ball = *region.ball();
    let r = ball.radius;
    let halfspaces = region.halfspaces().to_vec();
    let (frac, n) = mc_fraction(samples, seed, |rng| {
        let p = ball.center
            + Vec3::new(
                rng.random_range(-r..r),
                rng.random_range(-r..r),
                rng.random_range(-r..r),
            );
        p.distance(ball.center) <= r && halfspaces.iter().all(|h| h.signed_distance(p) <= 0.0)
    });
    estimate(8.0 * r * r * r, frac, n)
}

/// Monte Carlo polyhedron volume by rejection sampling in its bounding box.
pub fn mc_poly_volume(poly: &ConvexPolyhedron, samples: u64, seed: u64) -> McEstimate {
    assert!(samples >= 10_000, "need at least 1e4 samples");
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for &v in poly.vertices() {
        lo = Vec3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
        hi = Vec3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
    }
    let planes: Vec<Plane> = (0..poly.faces().len()).map(|f| poly.face_plane(f)).collect();
    let measure = (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
    let (frac, n) = mc_fraction(samples, seed, |rng| {
        let p = Vec3::new(
            rng.random_range(lo.x..hi.x),
            rng.random_range(lo.y..hi.y),
            rng.random_range(lo.z..hi.z),
        );
        planes.iter().all(|pl| pl.signed_distance(p) <= 0.0)
    });
    estimate(measure, frac, n)
}

/// Closest boundary point from `o` by dense sampling of every face (interior
/// grid, edges and vertices) followed by shrinking-ring refinement on every
/// face whose best sample came close to the winner (the true minimizer can
/// sit one grid cell into a neighboring face). Independent of the exact
/// feature-scan implementation.
pub fn sampled_closest_point(poly: &ConvexPolyhedron, o: Vec3, density: f64) -> Vec3 {
    assert!(density > 0.0);
    let mut per_face: Vec<(f64, (f64, f64))> = Vec::with_capacity(poly.faces().len());

    for fi in 0..poly.faces().len() {
        let (cycle, to3) = face_frame(poly, fi);
        let mut face_best = (f64::INFINITY, (0.0, 0.0));
        let mut consider = |p2: (f64, f64)| {
            let d = to3(p2).distance(o);
            if d < face_best.0 {
                face_best = (d, p2);
            }
        };

        // Grid over the bounding box of the face polygon.
        let (ulo, uhi) = cycle
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.0), hi.max(p.0))
            });
        let (vlo, vhi) = cycle
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.1), hi.max(p.1))
            });
        let nu = ((uhi - ulo) / density).ceil() as usize + 1;
        let nv = ((vhi - vlo) / density).ceil() as usize + 1;
        for iu in 0..=nu {
            for iv in 0..=nv {
                let p2 = (
                    ulo + (uhi - ulo) * iu as f64 / nu as f64,
                    vlo + (vhi - vlo) * iv as f64 / nv as f64,
                );
                if point_in_polygon_2d(&cycle, p2) {
                    consider(p2);
                }
            }
        }
        // Edge subdivisions catch boundary minima the grid misses.
        for k in 0..cycle.len() {
            let a = cycle[k];
            let b = cycle[(k + 1) % cycle.len()];
            let len = f64::hypot(b.0 - a.0, b.1 - a.1);
            let steps = (len / density).ceil().max(1.0) as usize;
            for s in 0..=steps {
                let t = s as f64 / steps as f64;
                consider((a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t));
            }
        }
        per_face.push(face_best);
    }

    let global = per_face
        .iter()
        .map(|&(d, _)| d)
        .fold(f64::INFINITY, f64::min);

    let mut best: Option<(f64, Vec3)> = None;
    for (fi, &(d, start)) in per_face.iter().enumerate() {
        if d > global + 2.0 * density {
            continue;
        }
        let (cycle, to3) = face_frame(poly, fi);
        let mut cur = start;
        let mut radius = density;
        while radius > 1e-10 {
            let mut improved = false;
            for k in 0..16 {
                let th = std::f64::consts::TAU * k as f64 / 16.0;
                let mut cand = (cur.0 + radius * th.cos(), cur.1 + radius * th.sin());
                if !point_in_polygon_2d(&cycle, cand) {
                    cand = clamp_to_polygon_2d(&cycle, cand);
                }
                if to3(cand).distance(o) < to3(cur).distance(o) {
                    cur = cand;
                    improved = true;
                }
            }
            if !improved {
                radius *= 0.5;
            }
        }
        let p = to3(cur);
        let dist = p.distance(o);
        if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
            best = Some((dist, p));
        }
    }
    best.expect("polyhedron has faces").1
}

#[allow(clippy::type_complexity)]
fn face_frame(
    poly: &ConvexPolyhedron,
    fi: usize,
) -> (Vec<(f64, f64)>, impl Fn((f64, f64)) -> Vec3 + '_) {
    let plane = poly.face_plane(fi);
    let axis_u = plane.unit_normal.any_orthonormal();
    let axis_v = plane.unit_normal.cross(axis_u);
    let origin = poly.face_centroid(fi);
    let cycle: Vec<(f64, f64)> = poly.faces()[fi]
        .iter()
        .map(|&vi| {
            let d = poly.vertex(vi) - origin;
            (d.dot(axis_u), d.dot(axis_v))
        })
        .collect();
    (cycle, move |p: (f64, f64)| {
        origin + axis_u * p.0 + axis_v * p.1
    })
}

fn point_in_polygon_2d(cycle: &[(f64, f64)], p: (f64, f64)) -> bool {
    let n = cycle.len();
    let mut sign = 0.0f64;
    for k in 0..n {
        let a = cycle[k];
        let b = cycle[(k + 1) % n];
        let cr = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
        if cr.abs() <= 1e-15 {
            continue;
        }
        if sign == 0.0 {
            sign = cr.signum();
        } else if cr.signum() != sign {
            return false;
        }
    }
    true
}

fn clamp_to_polygon_2d(cycle: &[(f64, f64)], p: (f64, f64)) -> (f64, f64) {
    let mut best = cycle[0];
    let mut best_d = f64::INFINITY;
    let n = cycle.len();
    for k in 0..n {
        let a = cycle[k];
        let b = cycle[(k + 1) % n];
        let (ex, ey) = (b.0 - a.0, b.1 - a.1);
        let len_sq = ex * ex + ey * ey;
        let t = if len_sq > 0.0 {
            (((p.0 - a.0) * ex + (p.1 - a.1) * ey) / len_sq).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let q = (a.0 + ex * t, a.1 + ey * t);
        let d = f64::hypot(p.0 - q.0, p.1 - q.1);
        if d < best_d {
            best_d = d;
            best = q;
        }
    }
    best
}

/// Exhaustive ZYZ Euler rotation grid: the reference for bounding-box
/// quality. The third angle only needs a quarter turn (axis-aligned boxes
/// are invariant under 90-degree spins about a box axis).
pub fn grid_min_box(poly: &ConvexPolyhedron, resolution_deg: f64) -> OrientedBox {
    assert!(resolution_deg <= 2.0 + 1e-12, "resolution must be <= 2 degrees");
    let step = resolution_deg.to_radians();
    let na = (std::f64::consts::TAU / step).ceil() as usize;
    let nb = (std::f64::consts::PI / step).ceil() as usize + 1;
    let nc = (std::f64::consts::FRAC_PI_2 / step).ceil() as usize;
    let verts = poly.vertices();

    let best = (0..na)
        .into_par_iter()
        .map(|ia| {
            let alpha = ia as f64 * step;
            let mut local: (f64, usize, [Vec3; 3], [f64; 6]) = (
                f64::INFINITY,
                usize::MAX,
                [Vec3::ZERO; 3],
                [0.0; 6],
            );
            for ib in 0..nb {
                let beta = (ib as f64 * step).min(std::f64::consts::PI);
                for ic in 0..nc {
                    let gamma = ic as f64 * step;
                    let rows = euler_zyz_rows(alpha, beta, gamma);
                    let mut lo = [f64::INFINITY; 3];
                    let mut hi = [f64::NEG_INFINITY; 3];
                    for &v in verts {
                        for k in 0..3 {
                            let d = rows[k].dot(v);
                            lo[k] = lo[k].min(d);
                            hi[k] = hi[k].max(d);
                        }
                    }
                    let vol = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
                    let idx = (ia * nb + ib) * nc + ic;
                    if vol < local.0 || (vol == local.0 && idx < local.1) {
                        local = (
                            vol,
                            idx,
                            rows,
                            [lo[0], hi[0], lo[1], hi[1], lo[2], hi[2]],
                        );
                    }
                }
            }
            local
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, [Vec3::ZERO; 3], [0.0; 6]),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );

    let (_, _, axes, ext) = best;
    let half = [
        0.5 * (ext[1] - ext[0]),
        0.5 * (ext[3] - ext[2]),
        0.5 * (ext[5] - ext[4]),
    ];
    let mid = [
        0.5 * (ext[0] + ext[1]),
        0.5 * (ext[2] + ext[3]),
        0.5 * (ext[4] + ext[5]),
    ];
    OrientedBox {
        center: axes[0] * mid[0] + axes[1] * mid[1] + axes[2] * mid[2],
        axes,
        half_extents: half,
    }
}

/// How much the grid minimum may exceed the continuum minimum at this
/// resolution: every extent can shrink by at most `4 sin(theta/2) rho` when
/// the orientation moves by the grid covering angle `theta ~ 1.5 * step`.
pub fn grid_slack(grid_box: &OrientedBox, circumradius: f64, resolution_deg: f64) -> f64 {
    let theta = 1.5 * resolution_deg.to_radians();
    let delta = 4.0 * (theta / 2.0).sin() * circumradius;
    let [a, b, c] = grid_box.half_extents;
    let (a, b, c) = (2.0 * a, 2.0 * b, 2.0 * c);
    (a + delta) * (b + delta) * (c + delta) - a * b * c
}

fn euler_zyz_rows(alpha: f64, beta: f64, gamma: f64) -> [Vec3; 3] {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    // Rows of Rz(gamma) * Ry(beta) * Rz(alpha).
    [
        Vec3::new(
            cg * cb * ca - sg * sa,
            cg * cb * sa + sg * ca,
            -cg * sb,
        ),
        Vec3::new(
            -sg * cb * ca - cg * sa,
            -sg * cb * sa + cg * ca,
            sg * sb,
        ),
        Vec3::new(sb * ca, sb * sa, cb),
    ]
}

/// Estimate how the region boundary area splits across face sets: sample the
/// boundary (spherical part and each planar face, weighted by exact areas)
/// and label every sample by the nearest face set.
pub fn boundary_area_by_face_set(
    region: &Region,
    poly: &ConvexPolyhedron,
    face_sets: &[Vec<usize>],
    samples: u64,
    seed: u64,
    tol: &TolerancePolicy,
) -> Vec<f64> {
    let ball = *region.ball();
    let sphere_area = region.sphere_surface_area();
    let planar = region.planar_face_areas();
    let total: f64 = sphere_area + planar.iter().sum::<f64>();
    let mut weights = vec![sphere_area.max(0.0)];
    weights.extend(planar.iter().copied());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; face_sets.len()];
    let mut labeled = 0u64;
    let wsum: f64 = weights.iter().sum();
    if wsum <= 0.0 {
        return vec![0.0; face_sets.len()];
    }

    'outer: for _ in 0..samples {
        // Pick a boundary component proportionally to its area.
        let mut pick = rng.random::<f64>() * wsum;
        let mut comp = 0usize;
        for (i, w) in weights.iter().enumerate() {
            if pick < *w {
                comp = i;
                break;
            }
            pick -= w;
        }
        // Rejection-sample a point on that component inside the region.
        let mut point = None;
        for _ in 0..10_000 {
            let cand = if comp == 0 {
                let u: f64 = rng.random_range(-1.0f64..1.0);
                let th = rng.random::<f64>() * std::f64::consts::TAU;
                let s = (1.0 - u * u).sqrt();
                ball.center + Vec3::new(s * th.cos(), s * th.sin(), u) * ball.radius
            } else {
                let hs = region.halfspaces()[comp - 1];
                let d = hs.signed_distance(ball.center);
                let rho_sq = ball.radius * ball.radius - d * d;
                if rho_sq <= 0.0 {
                    continue 'outer;
                }
                let rho = rho_sq.sqrt();
                let u = hs.unit_normal.any_orthonormal();
                let v = hs.unit_normal.cross(u);
                let r = rho * rng.random::<f64>().sqrt();
                let th = rng.random::<f64>() * std::f64::consts::TAU;
                hs.project(ball.center) + u * (r * th.cos()) + v * (r * th.sin())
            };
            let eps = tol.len_eps(ball.radius);
            let on_boundary_ok = region
                .halfspaces()
                .iter()
                .enumerate()
                .all(|(i, h)| comp == i + 1 || h.signed_distance(cand) <= eps);
            if on_boundary_ok {
                point = Some(cand);
                break;
            }
        }
        let Some(p) = point else { continue };
        // Nearest face set by distance to its face polygons.
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (si, set) in face_sets.iter().enumerate() {
            for &f in set {
                let d = distance_to_face(poly, f, p);
                if d < best_d {
                    best_d = d;
                    best = si;
                }
            }
        }
        if best != usize::MAX {
            counts[best] += 1;
            labeled += 1;
        }
    }

    if labeled == 0 {
        return vec![0.0; face_sets.len()];
    }
    counts
        .iter()
        .map(|&c| total * c as f64 / labeled as f64)
        .collect()
}

fn distance_to_face(poly: &ConvexPolyhedron, face: usize, p: Vec3) -> f64 {
    let plane = poly.face_plane(face);
    let foot = plane.project(p);
    let n = poly.normal(face);
    let cycle = poly.faces()[face].as_slice();
    let mut inside = true;
    for k in 0..cycle.len() {
        let a = poly.vertex(cycle[k]);
        let b = poly.vertex(cycle[(k + 1) % cycle.len()]);
        if (b - a).cross(foot - a).dot(n) < 0.0 {
            inside = false;
            break;
        }
    }
    if inside {
        return p.distance(foot);
    }
    let mut best = f64::INFINITY;
    for k in 0..cycle.len() {
        let a = poly.vertex(cycle[k]);
        let b = poly.vertex(cycle[(k + 1) % cycle.len()]);
        let ab = b - a;
        let t = ((p - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0);
        best = best.min(p.distance(a + ab * t));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::Ball;
    use std::f64::consts::PI;

    #[test]
    fn disk_area_against_known_value() {
        let region = Region::new(Ball::unit());
        let plane = Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.5);
        let est = mc_plane_region_area(&region, &plane, 1_000_000, 11);
        assert!(est.agrees_with(0.75 * PI, 3.0), "{est:?}");
    }

    #[test]
    fn empty_intersection_is_exactly_zero() {
        let region = Region::new(Ball::unit());
        let plane = Plane::new(Vec3::new(0.0, 0.0, 1.0), 1.5);
        let est = mc_plane_region_area(&region, &plane, 10_000, 1);
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn ball_and_half_ball_volumes() {
        let tol = TolerancePolicy::default();
        let region = Region::new(Ball::unit());
        let est = mc_region_volume(&region, 1_000_000, 5);
        assert!(est.agrees_with(4.0 * PI / 3.0, 3.0), "{est:?}");

        let (half, _) = region
            .apply_cut(
                &Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.0),
                Vec3::new(0.0, 0.0, -0.5),
                &tol,
            )
            .unwrap();
        let est = mc_region_volume(&half, 1_000_000, 6);
        assert!(est.agrees_with(2.0 * PI / 3.0, 3.0), "{est:?}");
    }

    #[test]
    fn mc_is_reproducible_per_seed() {
        let region = Region::new(Ball::unit());
        let a = mc_region_volume(&region, 100_000, 42).value;
        let b = mc_region_volume(&region, 100_000, 42).value;
        assert_eq!(a, b);
    }

    #[test]
    fn cube_volume_by_rejection_sampling() {
        let cube = crate::shapes::cube(0.4);
        let est = mc_poly_volume(&cube, 500_000, 3);
        assert!(est.agrees_with(cube.volume(), 3.0), "{est:?}");
    }

    #[test]
    fn grid_box_of_cubes_and_tetrahedron() {
        let tol = 0.0; // slack comes from the resolution bound below
        let cube = crate::shapes::cube(1.0);
        let g = grid_min_box(&cube, 2.0);
        let slack = grid_slack(&g, cube.circumradius(), 2.0);
        assert!(g.volume() >= 8.0 - 1e-9 && g.volume() <= 8.0 + slack + tol);

        let axis = Vec3::new(0.2, -1.0, 0.4).normalized().unwrap();
        let rot = cube.map_vertices(|v| v.rotate_about(axis, 0.456)).unwrap();
        let gr = grid_min_box(&rot, 2.0);
        let slack_r = grid_slack(&gr, rot.circumradius(), 2.0);
        assert!(gr.volume() >= 8.0 - 1e-9 && gr.volume() <= 8.0 + slack_r);

        let tetra = crate::shapes::regular_tetrahedron(0.5);
        let gt = grid_min_box(&tetra, 2.0);
        let slack_t = grid_slack(&gt, tetra.circumradius(), 2.0);
        assert!(gt.volume() >= 1.0 - 1e-9 && gt.volume() <= 1.0 + slack_t);
    }

    #[test]
    fn sampled_closest_point_cube_corner() {
        let cube = crate::shapes::aligned_box(Vec3::new(1.0, 1.0, 1.0), Vec3::new(2.0, 2.0, 2.0));
        let p = sampled_closest_point(&cube, Vec3::ZERO, 0.05);
        assert!(p.distance(Vec3::new(1.0, 1.0, 1.0)) < 1e-6);
    }

    #[test]
    fn sampled_closest_point_face_interior() {
        let b = crate::shapes::aligned_box(Vec3::new(1.0, -1.0, -1.0), Vec3::new(2.0, 1.0, 1.0));
        let p = sampled_closest_point(&b, Vec3::ZERO, 0.05);
        assert!(p.distance(Vec3::new(1.0, 0.0, 0.0)) < 1e-6);
    }
}
