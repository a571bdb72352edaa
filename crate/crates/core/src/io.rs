//! Text output helpers shared by the CSV writers.

/// Shortest decimal string that parses back to exactly `v`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && v.is_finite() && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(2.5), "2.5");
        assert_eq!(fmt_f64(1e-10), "1e-10");
        assert_eq!(fmt_f64(-3.0e20), "-3e20");
    }

    proptest! {
        #[test]
        fn round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = fmt_f64(v);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
