/// Combined absolute + relative tolerance policy.
///
/// One policy value is threaded through every module so tests can tighten or
/// loosen comparisons in a single place. Lengths are compared against
/// `abs_eps + rel_eps * scale` where `scale` is a characteristic length of the
/// instance (usually the stock ball radius).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TolerancePolicy {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            abs_eps: 1e-9,
            rel_eps: 1e-12,
        }
    }
}

impl TolerancePolicy {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Self {
        assert!(abs_eps > 0.0 && rel_eps > 0.0, "tolerances must be positive");
        Self { abs_eps, rel_eps }
    }

    /// Length tolerance at the given scale.
    #[inline]
    pub fn len_eps(&self, scale: f64) -> f64 {
        self.abs_eps + self.rel_eps * scale.abs()
    }

    /// `|a - b|` small at the given scale.
    #[inline]
    pub fn approx_eq(&self, a: f64, b: f64, scale: f64) -> bool {
        (a - b).abs() <= self.len_eps(scale)
    }

    /// `x` is (numerically) zero at the given scale.
    #[inline]
    pub fn is_zero(&self, x: f64, scale: f64) -> bool {
        x.abs() <= self.len_eps(scale)
    }
}
