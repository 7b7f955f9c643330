use crate::vec3::Vec3;

/// Oriented plane `{ p : dot(unit_normal, p) = offset }`.
///
/// `offset` is the signed distance of the plane from the origin along
/// `unit_normal`. Throughout the crate the kept side of a cut is the
/// non-positive side of `signed_distance`, so plan output normals point away
/// from the part being carved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub unit_normal: Vec3,
    pub offset: f64,
}

impl Plane {
    /// Plane from a (not necessarily unit) normal and a point on the plane.
    pub fn from_normal_point(normal: Vec3, point: Vec3) -> Option<Plane> {
        let unit_normal = normal.normalized()?;
        Some(Plane {
            unit_normal,
            offset: unit_normal.dot(point),
        })
    }

    pub fn new(unit_normal: Vec3, offset: f64) -> Plane {
        debug_assert!((unit_normal.norm() - 1.0).abs() < 1e-6);
        Plane {
            unit_normal,
            offset,
        }
    }

    /// Signed distance from the plane: positive on the normal side.
    #[inline]
    pub fn signed_distance(&self, p: Vec3) -> f64 {
        self.unit_normal.dot(p) - self.offset
    }

    /// Same plane with the opposite orientation.
    #[inline]
    pub fn flipped(&self) -> Plane {
        Plane {
            unit_normal: -self.unit_normal,
            offset: -self.offset,
        }
    }

    /// Foot of the perpendicular from `p` onto the plane.
    #[inline]
    pub fn project(&self, p: Vec3) -> Vec3 {
        p - self.unit_normal * self.signed_distance(p)
    }

    /// True when both planes describe the same oriented plane within `eps`
    /// (normal deviation) and `len_eps` (offset deviation).
    pub fn approx_eq_oriented(&self, other: &Plane, eps: f64, len_eps: f64) -> bool {
        (self.unit_normal.dot(other.unit_normal) - 1.0).abs() <= eps
            && (self.offset - other.offset).abs() <= len_eps
    }
}

/// Free-function form of [`Plane::signed_distance`].
#[inline]
pub fn signed_distance(plane: &Plane, p: Vec3) -> f64 {
    plane.signed_distance(p)
}
