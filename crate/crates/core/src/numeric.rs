//! Small shared numeric helpers.

/// Neumaier-compensated summation. Sequential and order-deterministic, so
/// callers that need reproducible aggregates sum pre-collected values with
/// this instead of reducing in arrival order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for value in values {
        let t = sum + value;
        compensation += if sum.abs() >= value.abs() {
            (sum - t) + value
        } else {
            (value - t) + sum
        };
        sum = t;
    }
    sum + compensation
}

/// Formats a float with 12 significant digits, the fixed width used in CSV
/// output.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive() {
        // 1 + 1e16 - 1e16 pattern loses the 1 in naive order.
        let values = [1.0, 1e16, -1e16];
        assert_eq!(neumaier_sum(values), 1.0);

        let many: Vec<f64> = std::iter::repeat_n(0.1, 1_000_000).collect();
        let sum = neumaier_sum(many.iter().copied());
        assert!((sum - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(0.1), "1.00000000000e-1");
        assert_eq!(format_sig12(0.09486832980505139), "9.48683298051e-2");
    }
}
