//! Plane-local 2D kernel: a disk clipped by half-plane lines, with exact area
//! by Green's-theorem decomposition into straight pieces and circular sectors.

/// Point in plane-local coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct P2 {
    pub x: f64,
    pub y: f64,
}

impl P2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
    fn dot(self, o: P2) -> f64 {
        self.x * o.x + self.y * o.y
    }
    fn cross(self, o: P2) -> f64 {
        self.x * o.y - self.y * o.x
    }
    fn norm_sq(self) -> f64 {
        self.dot(self)
    }
    fn lerp(self, o: P2, t: f64) -> P2 {
        P2::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

/// Half-plane constraint `a*x + b*y + c <= 0` with `hypot(a, b) = 1`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    fn eval(&self, p: P2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }
}

/// Clip a convex CCW polygon against one half-plane (Sutherland-Hodgman).
pub(crate) fn clip_polygon(poly: &[P2], hp: &HalfPlane) -> Vec<P2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let fp = hp.eval(p);
        let fq = hp.eval(q);
        if fp <= 0.0 {
            out.push(p);
            if fq > 0.0 {
                out.push(p.lerp(q, fp / (fp - fq)));
            }
        } else if fq <= 0.0 {
            out.push(p.lerp(q, fp / (fp - fq)));
        }
    }
    out
}

/// Exact area of `polygon ∩ disk(origin, r)` for a convex CCW polygon.
///
/// Each directed edge contributes straight (triangle) terms where it runs
/// inside the disk and circular-sector terms where it runs outside; summed
/// around the boundary this is the Green's-theorem area of the intersection.
pub(crate) fn circle_polygon_area(poly: &[P2], r: f64) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..poly.len() {
        total += edge_contribution(poly[i], poly[(i + 1) % poly.len()], r);
    }
    total.max(0.0)
}

fn edge_contribution(a: P2, b: P2, r: f64) -> f64 {
    let d = P2::new(b.x - a.x, b.y - a.y);
    let qa = d.norm_sq();
    if qa == 0.0 {
        return 0.0;
    }
    // Split the edge at its circle crossings.
    let qb = 2.0 * a.dot(d);
    let qc = a.norm_sq() - r * r;
    let mut ts = [0.0f64, 1.0, 1.0, 1.0];
    let mut k = 1;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc > 0.0 {
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                ts[k] = t;
                k += 1;
            }
        }
        ts[..=k].sort_by(f64::total_cmp);
    }
    ts[k] = 1.0;

    let mut sum = 0.0;
    for w in 0..k {
        let (t0, t1) = (ts[w], ts[w + 1]);
        if t1 <= t0 {
            continue;
        }
        let p = a.lerp(b, t0);
        let q = a.lerp(b, t1);
        let mid = a.lerp(b, 0.5 * (t0 + t1));
        if mid.norm_sq() <= r * r {
            sum += 0.5 * p.cross(q);
        } else {
            sum += 0.5 * r * r * f64::atan2(p.cross(q), p.dot(q));
        }
    }
    sum
}

/// A disk of radius `r` clipped by half-plane lines: the shape of a planar
/// region face. `polygon = None` means no line touches the disk.
#[derive(Debug, Clone)]
pub(crate) struct ClippedDisk {
    pub radius: f64,
    pub polygon: Option<Vec<P2>>,
}

impl ClippedDisk {
    /// Clip the disk by the given constraints. Lines that miss the disk are
    /// resolved immediately (kept side: skip; removed side: empty).
    pub fn build(radius: f64, constraints: &[HalfPlane]) -> ClippedDisk {
        let r = radius;
        let mut poly: Option<Vec<P2>> = None;
        for hp in constraints {
            // Line at signed distance -c from the origin along (a, b).
            if hp.c >= r {
                return ClippedDisk {
                    radius: r,
                    polygon: Some(Vec::new()),
                };
            }
            if hp.c <= -r {
                continue;
            }
            let p = poly.get_or_insert_with(|| {
                let s = 2.0 * r;
                vec![
                    P2::new(-s, -s),
                    P2::new(s, -s),
                    P2::new(s, s),
                    P2::new(-s, s),
                ]
            });
            *p = clip_polygon(p, hp);
            if p.len() < 3 {
                return ClippedDisk {
                    radius: r,
                    polygon: Some(Vec::new()),
                };
            }
        }
        ClippedDisk {
            radius: r,
            polygon: poly,
        }
    }

    pub fn area(&self) -> f64 {
        match &self.polygon {
            None => std::f64::consts::PI * self.radius * self.radius,
            Some(p) => circle_polygon_area(p, self.radius),
        }
    }
}
