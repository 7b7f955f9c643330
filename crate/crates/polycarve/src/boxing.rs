//! Bounding-box phase: a near-minimum-volume oriented box of the part, the
//! cuts that carve that box out of the stock, and the certified lower bounds
//! on the optimal cutting cost.

use crate::cut::{Cut, CutKind, SourceFeature};
use crate::error::{Error, Result};
use crate::plane::Plane;
use crate::polyhedron::ConvexPolyhedron;
use crate::region::{Ball, Region};
use crate::separation::Placement;
use crate::tol::TolerancePolicy;
use crate::vec3::Vec3;

/// Oriented rectangular box: center, orthonormal axes, positive half-extents.
#[derive(Debug, Clone, Copy)]
pub struct OrientedBox {
    pub center: Vec3,
    pub axes: [Vec3; 3],
    pub half_extents: [f64; 3],
}

impl OrientedBox {
    pub fn volume(&self) -> f64 {
        8.0 * self.half_extents[0] * self.half_extents[1] * self.half_extents[2]
    }

    /// Surface area `8(ab + bc + ca)` for half-extents `a, b, c`.
    pub fn surface_area(&self) -> f64 {
        let [a, b, c] = self.half_extents;
        8.0 * (a * b + b * c + c * a)
    }

    pub fn contains(&self, p: Vec3, eps: f64) -> bool {
        let d = p - self.center;
        (0..3).all(|k| d.dot(self.axes[k]).abs() <= self.half_extents[k] + eps)
    }

    /// Supporting plane of one of the six faces; `face = 2*axis + (sign<0)`.
    pub fn face_plane(&self, face: usize) -> Plane {
        let axis = face / 2;
        let sign = if face.is_multiple_of(2) { 1.0 } else { -1.0 };
        let n = self.axes[axis] * sign;
        Plane::new(n, n.dot(self.center) + self.half_extents[axis])
    }

    /// Area of one of the six faces.
    pub fn face_area(&self, face: usize) -> f64 {
        let axis = face / 2;
        let [a, b, c] = self.half_extents;
        match axis {
            0 => 4.0 * b * c,
            1 => 4.0 * a * c,
            _ => 4.0 * a * b,
        }
    }
}

/// Box fitted to the part along a given orthonormal frame.
fn fitted_box(poly: &ConvexPolyhedron, axes: [Vec3; 3]) -> OrientedBox {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for &v in poly.vertices() {
        for k in 0..3 {
            let d = axes[k].dot(v);
            lo[k] = lo[k].min(d);
            hi[k] = hi[k].max(d);
        }
    }
    let half = [
        0.5 * (hi[0] - lo[0]),
        0.5 * (hi[1] - lo[1]),
        0.5 * (hi[2] - lo[2]),
    ];
    let mid = [
        0.5 * (lo[0] + hi[0]),
        0.5 * (lo[1] + hi[1]),
        0.5 * (lo[2] + hi[2]),
    ];
    OrientedBox {
        center: axes[0] * mid[0] + axes[1] * mid[1] + axes[2] * mid[2],
        axes,
        half_extents: half,
    }
}

/// Include edge-pair candidate axes only while the quadratic pair count
/// stays cheap; larger meshes rely on face-flush candidates plus refinement.
const EDGE_PAIR_LIMIT: usize = 256;

/// Near-minimum-volume bounding box.
///
/// Candidates: for every hull face normal (and, on small meshes, every
/// normalized edge-pair cross product) taken as one box axis, the in-plane
/// rectangle is optimized exactly by rotating calipers on the projected
/// hull. The best candidate is then polished by coordinate-descent rotation.
pub fn min_volume_box(poly: &ConvexPolyhedron, tol: &TolerancePolicy) -> Result<OrientedBox> {
    let scale = poly.circumradius();
    let mut candidates: Vec<Vec3> = (0..poly.faces().len()).map(|f| poly.normal(f)).collect();
    if poly.edges().len() <= EDGE_PAIR_LIMIT {
        let edges = poly.edges();
        for i in 0..edges.len() {
            let ei = poly.vertex(edges[i].v[1]) - poly.vertex(edges[i].v[0]);
            for e in edges.iter().skip(i + 1) {
                let ej = poly.vertex(e.v[1]) - poly.vertex(e.v[0]);
                if let Some(w) = ei.cross(ej).normalized() {
                    candidates.push(w);
                }
            }
        }
    }

    let mut best: Option<OrientedBox> = None;
    for w in candidates {
        let u0 = w.any_orthonormal();
        let v0 = w.cross(u0);
        let pts: Vec<(f64, f64)> = poly
            .vertices()
            .iter()
            .map(|&p| (u0.dot(p), v0.dot(p)))
            .collect();
        let hull = hull_2d(&pts);
        if hull.len() < 3 {
            continue;
        }
        let (du, dv) = min_area_rect_axes(&hull);
        let a1 = u0 * du.0 + v0 * du.1;
        let a2 = u0 * dv.0 + v0 * dv.1;
        let b = fitted_box(poly, [a1, a2, w]);
        if best.as_ref().is_none_or(|x| b.volume() < x.volume()) {
            best = Some(b);
        }
    }
    let mut best = best.ok_or_else(|| {
        Error::DegenerateGeometry("no usable bounding-box candidate axis".into())
    })?;

    // Local rotation refinement around the winning frame.
    let mut step = 0.05f64;
    while step > 1e-5 {
        let mut improved = false;
        for k in 0..3 {
            for s in [step, -step] {
                let axis = best.axes[k];
                let mut axes = best.axes.map(|a| a.rotate_about(axis, s));
                orthonormalize(&mut axes);
                let b = fitted_box(poly, axes);
                if b.volume() < best.volume() * (1.0 - 1e-12) {
                    best = b;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let min_extent = best.half_extents.iter().copied().fold(f64::INFINITY, f64::min);
    if min_extent <= tol.len_eps(scale) {
        return Err(Error::DegenerateGeometry("part is flat within tolerance".into()));
    }
    Ok(best)
}

fn orthonormalize(axes: &mut [Vec3; 3]) {
    axes[0] = axes[0].normalized().expect("nonzero axis");
    axes[1] = (axes[1] - axes[0] * axes[0].dot(axes[1]))
        .normalized()
        .expect("independent axes");
    axes[2] = axes[0].cross(axes[1]);
}

/// Andrew monotone chain, strict turns (collinear points dropped).
fn hull_2d(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p: Vec<(f64, f64)> = pts.to_vec();
    p.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * p.len());
    for &pt in &p {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0.0 {
            hull.pop();
        }
        hull.push(pt);
    }
    let lower_len = hull.len() + 1;
    for &pt in p.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0.0
        {
            hull.pop();
        }
        hull.push(pt);
    }
    hull.pop();
    hull
}

/// Rotating calipers: in-plane unit axes of the minimum-area bounding
/// rectangle of a CCW convex polygon.
fn min_area_rect_axes(hull: &[(f64, f64)]) -> ((f64, f64), (f64, f64)) {
    let n = hull.len();
    let dot = |a: (f64, f64), b: (f64, f64)| a.0 * b.0 + a.1 * b.1;
    let proj = |d: (f64, f64), i: usize| dot(d, hull[i % n]);

    let mut best_area = f64::INFINITY;
    let mut best = ((1.0, 0.0), (0.0, 1.0));
    // Support indices: max along the edge direction, max along the outward
    // perpendicular, min along the edge direction. They advance monotonically
    // as the edge rotates, so the whole scan is linear.
    let (mut j, mut k, mut l) = (0usize, 0usize, 0usize);
    for i in 0..n {
        let e = (
            hull[(i + 1) % n].0 - hull[i].0,
            hull[(i + 1) % n].1 - hull[i].1,
        );
        let len = f64::hypot(e.0, e.1);
        if len == 0.0 {
            continue;
        }
        let d = (e.0 / len, e.1 / len);
        let perp = (-d.1, d.0);
        if i == 0 {
            for m in 0..n {
                if proj(d, m) > proj(d, j) {
                    j = m;
                }
                if proj(perp, m) > proj(perp, k) {
                    k = m;
                }
                if proj(d, m) < proj(d, l) {
                    l = m;
                }
            }
        } else {
            while proj(d, j + 1) >= proj(d, j) {
                j += 1;
                if j >= 2 * n {
                    break;
                }
            }
            while proj(perp, k + 1) >= proj(perp, k) {
                k += 1;
                if k >= 2 * n {
                    break;
                }
            }
            while proj(d, l + 1) <= proj(d, l) {
                l += 1;
                if l >= 2 * n {
                    break;
                }
            }
        }
        let width = proj(d, j) - proj(d, l);
        let height = proj(perp, k) - dot(perp, hull[i]);
        let area = width * height;
        if area < best_area {
            best_area = area;
            best = (d, perp);
        }
    }
    best
}

/// Area of the part's orthogonal shadow along `dir`.
pub fn projected_shadow_area(poly: &ConvexPolyhedron, dir: Vec3) -> f64 {
    let w = dir.normalized().expect("nonzero direction");
    let u = w.any_orthonormal();
    let v = w.cross(u);
    let pts: Vec<(f64, f64)> = poly
        .vertices()
        .iter()
        .map(|&p| (u.dot(p), v.dot(p)))
        .collect();
    let hull = hull_2d(&pts);
    let mut area = 0.0;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        area += a.0 * b.1 - a.1 * b.0;
    }
    0.5 * area.abs()
}

/// Certified lower bounds on the optimal cutting cost.
#[derive(Debug, Clone, Copy)]
pub struct LowerBounds {
    /// `pi r^2`, the d-separation cost (cornered parts only).
    pub cornered_bound: Option<f64>,
    /// `pi R^2` (centered parts only).
    pub centered_bound: Option<f64>,
    /// One sixth of the bounding-box surface area.
    pub box_bound: f64,
    /// Max of the bounds present.
    pub combined: f64,
}

pub fn lower_bounds(ball: &Ball, bbox: &OrientedBox, placement: &Placement) -> LowerBounds {
    let box_bound = bbox.surface_area() / 6.0;
    let (cornered_bound, centered_bound) = match placement {
        Placement::Cornered(cp) => {
            let r_sq = ball.radius * ball.radius - cp.distance * cp.distance;
            (Some(std::f64::consts::PI * r_sq), None)
        }
        Placement::Centered => (
            None,
            Some(std::f64::consts::PI * ball.radius * ball.radius),
        ),
    };
    let combined = [Some(box_bound), cornered_bound, centered_bound]
        .into_iter()
        .flatten()
        .fold(f64::NEG_INFINITY, f64::max);
    LowerBounds {
        cornered_bound,
        centered_bound,
        box_bound,
        combined,
    }
}

/// Everything the box phase produced, including the numbers the phase's
/// surface-area budget is checked against.
#[derive(Debug, Clone)]
pub struct BoxPhaseOutcome {
    pub region: Region,
    pub cuts: Vec<Cut>,
    /// Outer surface area of the region entering the six box-face cuts
    /// (after the optional d-separation).
    pub entry_surface_area: f64,
    /// Sum of the six box-face cut costs.
    pub six_cut_total: f64,
    pub dsep_cost: Option<f64>,
}

/// Cut the bounding box out of the fresh stock: the d-separation first when
/// cornered, then the six box-face planes, largest faces first (ties by axis
/// index, positive side before negative).
pub fn box_cut_phase(
    region: &Region,
    poly: &ConvexPolyhedron,
    bbox: &OrientedBox,
    placement: &Placement,
    tol: &TolerancePolicy,
) -> Result<BoxPhaseOutcome> {
    debug_assert!(region.halfspaces().is_empty(), "box phase expects fresh stock");
    let keep = poly.centroid();
    let mut cuts = Vec::with_capacity(7);
    let mut current = region.clone();
    let mut dsep_cost = None;

    if let Placement::Cornered(cp) = placement {
        let n = (cp.point - region.ball().center)
            .normalized()
            .ok_or(Error::CenteredInput)?;
        let plane = Plane::new(n, n.dot(cp.point));
        let (next, cost) = current.apply_cut(&plane, keep, tol)?;
        let oriented = *next.halfspaces().last().expect("cut was appended");
        // The separation must leave the center strictly on the discarded side.
        debug_assert!(oriented.signed_distance(region.ball().center) > 0.0);
        cuts.push(Cut {
            plane: oriented,
            kind: CutKind::DSeparation,
            face_round: None,
            edge_round: None,
            source: None,
            cost,
        });
        dsep_cost = Some(cost);
        current = next;
    }

    let entry_surface_area = current.outer_surface_area();

    let mut order: Vec<usize> = (0..6).collect();
    order.sort_by(|&a, &b| {
        bbox.face_area(b)
            .total_cmp(&bbox.face_area(a))
            .then(a.cmp(&b))
    });

    let mut six_cut_total = 0.0;
    for face in order {
        let plane = bbox.face_plane(face);
        let (next, cost) = current.apply_cut(&plane, keep, tol)?;
        cuts.push(Cut {
            plane: *next.halfspaces().last().expect("cut was appended"),
            kind: CutKind::Box,
            face_round: None,
            edge_round: None,
            source: Some(SourceFeature::BoxFace(face)),
            cost,
        });
        six_cut_total += cost;
        current = next;
    }

    Ok(BoxPhaseOutcome {
        region: current,
        cuts,
        entry_surface_area,
        six_cut_total,
        dsep_cost,
    })
}
