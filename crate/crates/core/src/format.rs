//! Deterministic number formatting for CSV output.

/// Formats `v` with six significant digits: fixed notation for magnitudes in
/// `[1e-4, 1e6)`, scientific otherwise.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let mag = v.abs();
    if (1e-4..1e6).contains(&mag) {
        let exponent = mag.log10().floor() as i32;
        let decimals = (5 - exponent).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    }
}

/// Fixed notation with `decimals` places.
pub fn fixed(v: f64, decimals: usize) -> String {
    format!("{v:.decimals$}")
}

/// Rounds to `decimals` places; the result parses back from [`fixed`] exactly.
pub fn round_to(v: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (v * scale).round() / scale
}

/// Shortest representation that parses back to the same value.
pub fn label(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.710_243_185_937_890_9), "0.710243");
        assert_eq!(sig6(1234.5678), "1234.57");
        assert_eq!(sig6(-2.0), "-2.00000");
        assert_eq!(sig6(1e-9), "1.00000e-9");
        assert_eq!(sig6(3.3e7), "3.30000e7");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn rounding_round_trips_through_fixed() {
        for &v in &[0.495_912, 4.502_849, 0.004_049_9, 1.411_900_28] {
            let r = round_to(v, 4);
            assert_eq!(fixed(r, 4).parse::<f64>().unwrap(), r);
        }
        assert_eq!(label(2.5), "2.5");
        assert_eq!(label(10.0), "10");
    }
}
