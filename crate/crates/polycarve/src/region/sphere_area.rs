//! Spherical part of a region's boundary area.
//!
//! Fast path: when the half-space caps are pairwise non-interacting on the
//! sphere, the remaining spherical surface is `4 pi R^2` minus the cap areas
//! (`2 pi R h` each). Otherwise an adaptive icosahedral quadrature takes
//! over: interior cells are summed with the exact spherical-triangle solid
//! angle, leaf cells crossing a cap boundary are clipped flat and measured by
//! the solid angle of the clipped polygon. Target: 1e-6 relative.

use std::f64::consts::PI;

use crate::plane::Plane;
use crate::vec3::{triple, Vec3};

use super::Ball;

/// Angular margin below which cap relations count as ambiguous and the
/// quadrature fallback is used.
const ANGLE_MARGIN: f64 = 1e-7;

/// Adaptive subdivision depth; leaf edge ~ 0.65 / 2^11 rad, giving boundary
/// error well under the 1e-6 relative target.
const MAX_DEPTH: u32 = 11;

struct Cap {
    axis: Vec3,
    /// Signed plane position along the axis from the center; the cap removes
    /// sphere points with `dot(axis, x - center) > t`.
    t: f64,
    alpha: f64,
}

pub(crate) fn sphere_part_area(ball: &Ball, halfspaces: &[Plane]) -> f64 {
    let r = ball.radius;
    let mut caps: Vec<Cap> = Vec::new();
    for hs in halfspaces {
        let t = hs.offset - hs.unit_normal.dot(ball.center);
        if t >= r {
            continue; // plane clears the sphere on the kept side
        }
        if t <= -r {
            return 0.0; // the whole sphere is on the removed side
        }
        let cap = Cap {
            axis: hs.unit_normal,
            t,
            alpha: (t / r).clamp(-1.0, 1.0).acos(),
        };
        // Drop exact duplicates (the same plane applied twice).
        if !caps
            .iter()
            .any(|c| c.axis.dot(cap.axis) > 1.0 - 1e-12 && (c.t - cap.t).abs() <= 1e-12 * r)
        {
            caps.push(cap);
        }
    }
    if caps.is_empty() {
        return 4.0 * PI * r * r;
    }

    // Remove caps certainly contained in another cap.
    let mut alive = vec![true; caps.len()];
    loop {
        let mut changed = false;
        for i in 0..caps.len() {
            if !alive[i] {
                continue;
            }
            for j in 0..caps.len() {
                if i == j || !alive[j] {
                    continue;
                }
                let gamma = caps[i].axis.dot(caps[j].axis).clamp(-1.0, 1.0).acos();
                if gamma + caps[j].alpha <= caps[i].alpha - ANGLE_MARGIN {
                    alive[j] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let kept: Vec<&Cap> = caps.iter().zip(&alive).filter(|(_, &a)| a).map(|(c, _)| c).collect();

    // Pairwise disjoint (with margin)? Then cap areas just subtract.
    let mut disjoint = true;
    'outer: for i in 0..kept.len() {
        for j in i + 1..kept.len() {
            let gamma = kept[i].axis.dot(kept[j].axis).clamp(-1.0, 1.0).acos();
            if gamma < kept[i].alpha + kept[j].alpha + ANGLE_MARGIN {
                disjoint = false;
                break 'outer;
            }
        }
    }
    if disjoint {
        let removed: f64 = kept.iter().map(|c| 2.0 * PI * r * (r - c.t)).sum();
        return (4.0 * PI * r * r - removed).max(0.0);
    }

    quadrature(ball, halfspaces)
}

fn quadrature(ball: &Ball, halfspaces: &[Plane]) -> f64 {
    let ico = crate::shapes::icosahedron(1.0);
    let mut total = 0.0;
    for f in ico.faces() {
        let tri = [
            ico.vertex(f[0]).normalized().unwrap(),
            ico.vertex(f[1]).normalized().unwrap(),
            ico.vertex(f[2]).normalized().unwrap(),
        ];
        total += patch_area(ball, halfspaces, tri, 0);
    }
    total
}

fn patch_area(ball: &Ball, halfspaces: &[Plane], tri: [Vec3; 3], depth: u32) -> f64 {
    let r = ball.radius;
    let m = (tri[0] + tri[1] + tri[2]).normalized().expect("non-degenerate patch");
    let cos_ang = tri.iter().map(|u| u.dot(m)).fold(f64::INFINITY, f64::min);

    if cos_ang > 0.1 {
        // Bound on how far a linear functional can exceed its corner values
        // over the curved patch.
        let slack = r * (1.0 / cos_ang - 1.0);
        let mut all_kept = true;
        for hs in halfspaces {
            let vals = tri.map(|u| hs.signed_distance(ball.center + u * r));
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if lo - slack >= 0.0 {
                return 0.0;
            }
            if hi + slack > 0.0 {
                all_kept = false;
            }
        }
        if all_kept {
            return r * r * solid_angle(tri[0], tri[1], tri[2]);
        }
    }

    if depth >= MAX_DEPTH {
        return r * r * clipped_chord_solid_angle(ball, halfspaces, tri);
    }

    let ab = (tri[0] + tri[1]).normalized().unwrap();
    let bc = (tri[1] + tri[2]).normalized().unwrap();
    let ca = (tri[2] + tri[0]).normalized().unwrap();
    patch_area(ball, halfspaces, [tri[0], ab, ca], depth + 1)
        + patch_area(ball, halfspaces, [ab, tri[1], bc], depth + 1)
        + patch_area(ball, halfspaces, [ca, bc, tri[2]], depth + 1)
        + patch_area(ball, halfspaces, [ab, bc, ca], depth + 1)
}

/// Solid angle of a spherical triangle given unit corner directions
/// (Van Oosterom-Strackee).
fn solid_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let num = triple(a, b, c);
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    (2.0 * f64::atan2(num, den)).abs()
}

/// Clip the flat chord triangle by all half-spaces, then measure the solid
/// angle of the clipped polygon as seen from the ball center.
fn clipped_chord_solid_angle(ball: &Ball, halfspaces: &[Plane], tri: [Vec3; 3]) -> f64 {
    let mut poly: Vec<Vec3> = tri.iter().map(|u| ball.center + *u * ball.radius).collect();
    for hs in halfspaces {
        poly = clip_polygon_3d(&poly, hs);
        if poly.len() < 3 {
            return 0.0;
        }
    }
    let dirs: Vec<Vec3> = poly
        .iter()
        .filter_map(|p| (*p - ball.center).normalized())
        .collect();
    if dirs.len() < 3 {
        return 0.0;
    }
    let mut sum = 0.0;
    for k in 1..dirs.len() - 1 {
        sum += solid_angle(dirs[0], dirs[k], dirs[k + 1]);
    }
    sum
}

pub(crate) fn clip_polygon_3d(poly: &[Vec3], plane: &Plane) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let fp = plane.signed_distance(p);
        let fq = plane.signed_distance(q);
        if fp <= 0.0 {
            out.push(p);
            if fq > 0.0 {
                out.push(p + (q - p) * (fp / (fp - fq)));
            }
        } else if fq <= 0.0 {
            out.push(p + (q - p) * (fp / (fp - fq)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ball() -> Ball {
        Ball {
            center: Vec3::ZERO,
            radius: 1.0,
        }
    }

    #[test]
    fn full_sphere() {
        assert!((sphere_part_area(&unit_ball(), &[]) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn single_cap_exact() {
        // Keep z <= 0.5: zone of height 1.5 remains.
        let hs = Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.5);
        let a = sphere_part_area(&unit_ball(), &[hs]);
        assert!((a - 2.0 * PI * 1.5).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_exact_on_disjoint_caps() {
        let hs = [
            Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.6),
            Plane::new(Vec3::new(1.0, 0.0, 0.0), 0.7),
        ];
        let exact = sphere_part_area(&unit_ball(), &hs);
        let quad = quadrature(&unit_ball(), &hs);
        assert!(
            (quad - exact).abs() <= 1e-6 * exact,
            "quad {quad} vs exact {exact}"
        );
    }

    #[test]
    fn overlapping_caps_fall_back_and_stay_sane() {
        // Two heavily overlapping caps around +z.
        let tilt = Vec3::new(0.3, 0.0, 1.0).normalized().unwrap();
        let hs = [
            Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.2),
            Plane::new(tilt, 0.25),
        ];
        let a = sphere_part_area(&unit_ball(), &hs);
        // Must be below either single-cap result and above the both-removed sum.
        let single0 = 4.0 * PI - 2.0 * PI * 0.8;
        let both: f64 = 4.0 * PI - 2.0 * (2.0 * PI * 0.8).min(2.0 * PI * 0.75);
        assert!(a < single0 + 1e-9);
        assert!(a > both - 1e-9);
    }

    #[test]
    fn duplicate_plane_counts_once() {
        let hs = Plane::new(Vec3::new(0.0, 0.0, 1.0), 0.0);
        let a = sphere_part_area(&unit_ball(), &[hs, hs]);
        assert!((a - 2.0 * PI).abs() < 1e-12);
    }
}
