//! Decimal rendering of floats for CSV output.

/// Renders `x` with 17 significant digits, which round-trips every finite
/// `f64` bit-exactly through `str::parse`.
pub fn f64_17(x: f64) -> String {
    if x == 0.0 {
        // keeps the sign of -0.0
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_values() {
        assert_eq!(f64_17(1.0), "1.0000000000000000e0");
        assert_eq!(f64_17(0.0), "0");
        assert_eq!(f64_17(-0.0), "-0");
    }

    proptest! {
        #[test]
        fn round_trips_bit_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = f64_17(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
