//! Plain-text output helpers shared by the CSV writers.

/// Full double precision: 17 significant digits in scientific notation.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Formats an optional value, leaving the field empty when absent.
pub fn format_opt(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_exactly() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::FRAC_PI_4, -2.5e-17, 0.0] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(format_opt(None), "");
    }
}
