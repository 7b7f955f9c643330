//! Instance generators: canonical solids and seeded random hulls, centered
//! or cornered inside the unit stock ball.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hull::{convex_hull, sphere_points};
use crate::polyhedron::ConvexPolyhedron;
use crate::region::Ball;
use crate::separation::{classify, closest_point};
use crate::shapes;
use crate::tol::TolerancePolicy;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Tetrahedron,
    Cube,
    Octahedron,
    Icosahedron,
    /// Convex hull of `n` seeded points on a sphere of radius 0.5, centered
    /// in the unit ball.
    RandomHull { n: usize, seed: u64 },
    /// The same kind of hull, shrunk and pushed off-center so the ball
    /// center falls 0.1..0.4 outside the part.
    RandomCornered { n: usize, seed: u64 },
}

impl Generator {
    /// Parse a CLI generator name; `n`/`seed` feed the random variants.
    pub fn parse(name: &str, n: usize, seed: u64) -> Result<Generator> {
        match name {
            "tetrahedron" => Ok(Generator::Tetrahedron),
            "cube" => Ok(Generator::Cube),
            "octahedron" => Ok(Generator::Octahedron),
            "icosahedron" => Ok(Generator::Icosahedron),
            "random_hull" => Ok(Generator::RandomHull { n, seed }),
            "random_cornered" => Ok(Generator::RandomCornered { n, seed }),
            other => Err(Error::Parse {
                path: "<generator>".into(),
                line: 0,
                msg: format!(
                    "unknown generator '{other}' (expected tetrahedron|cube|octahedron|icosahedron|random_hull|random_cornered)"
                ),
            }),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Generator::Tetrahedron => "tetrahedron".into(),
            Generator::Cube => "cube".into(),
            Generator::Octahedron => "octahedron".into(),
            Generator::Icosahedron => "icosahedron".into(),
            Generator::RandomHull { n, seed } => format!("random_hull(n={n},seed={seed})"),
            Generator::RandomCornered { n, seed } => format!("random_cornered(n={n},seed={seed})"),
        }
    }
}

/// A resolved instance: the part and its stock ball.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub poly: ConvexPolyhedron,
    pub ball: Ball,
}

pub fn generate(g: &Generator, tol: &TolerancePolicy) -> Result<Instance> {
    let ball = Ball::unit();
    let poly = match *g {
        Generator::Tetrahedron => shapes::regular_tetrahedron(0.35),
        Generator::Cube => shapes::cube(0.4),
        Generator::Octahedron => shapes::octahedron(0.55),
        Generator::Icosahedron => shapes::icosahedron(0.5),
        Generator::RandomHull { n, seed } => {
            if n < 4 {
                return Err(Error::DegenerateHull);
            }
            convex_hull(&sphere_points(n, 0.5, seed))?
        }
        Generator::RandomCornered { n, seed } => {
            if n < 4 {
                return Err(Error::DegenerateHull);
            }
            cornered_hull(n, seed, &ball, tol)?
        }
    };
    let instance = Instance {
        name: g.label(),
        poly,
        ball,
    };
    debug_assert!(classify(&instance.poly, &instance.ball, tol).is_ok());
    Ok(instance)
}

/// Shrink the hull to circumradius 0.25 about its centroid, then slide it
/// along a seeded direction until the ball center sits a seeded distance
/// 0.1..0.4 outside. The shrink keeps the far corner strictly inside the
/// unit ball for every target distance.
fn cornered_hull(n: usize, seed: u64, ball: &Ball, tol: &TolerancePolicy) -> Result<ConvexPolyhedron> {
    let hull = convex_hull(&sphere_points(n, 0.5, seed))?;
    let centroid = hull.centroid();
    let centered = hull.map_vertices(|v| v - centroid)?;
    let scale = 0.25 / centered.circumradius();
    let small = centered.map_vertices(|v| v * scale)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x00c0_ffee_d00d);
    let dir = loop {
        let v = Vec3::new(
            rng.random_range(-1.0f64..1.0),
            rng.random_range(-1.0f64..1.0),
            rng.random_range(-1.0f64..1.0),
        );
        if v.norm_sq() <= 1.0 {
            if let Some(u) = v.normalized() {
                break u;
            }
        }
    };
    let target: f64 = rng.random_range(0.1..0.4);

    // distance(origin, small + t*dir) = distance(-t*dir, small): zero at
    // t = 0 (the centroid is interior) and nondecreasing, so bisect.
    let dist_at = |t: f64| -> f64 {
        let q = dir * -t;
        if small.contains_point(q, tol) {
            0.0
        } else {
            closest_point(&small, q, tol)
                .map(|c| c.distance)
                .unwrap_or(0.0)
        }
    };
    let (mut lo, mut hi) = (0.0f64, 1.2f64);
    debug_assert!(dist_at(hi) > target);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dist_at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let out = small.map_vertices(|v| v + dir * t)?;

    // The construction must have produced a valid cornered instance.
    let placement = classify(&out, ball, tol)?;
    let crate::separation::Placement::Cornered(cp) = placement else {
        return Err(Error::DegenerateGeometry(
            "cornered generator produced a centered instance".into(),
        ));
    };
    debug_assert!(cp.distance > 0.099 && cp.distance < 0.401);
    Ok(out)
}
