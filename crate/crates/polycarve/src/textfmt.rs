//! Shared number formatting for the text formats: 17 significant digits,
//! enough for bit-faithful f64 round trips.

pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn parse_f64(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    v.is_finite().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_exactly() {
        for x in [
            0.5,
            -1.0 / 3.0,
            std::f64::consts::PI,
            1.0e-17,
            123456.789,
            -0.0,
        ] {
            let s = fmt17(x);
            let y = parse_f64(&s).unwrap();
            assert_eq!(x.to_bits(), y.to_bits(), "{s}");
        }
    }
}
