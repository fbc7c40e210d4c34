//! Canonical JSON: keys sorted, big integers and exact rationals as strings.

use serde_json::{json, Value};

use multiperm::decimal::{sqrt_to_scientific, to_fraction, to_scientific};
use multiperm::MomentSummary;

/// Significant digits used for decimal renderings of exact values.
pub const DIGITS: usize = 20;

/// Values below this are shown as `"<1e-300"`.
pub const P_VALUE_FLOOR: f64 = 1e-300;

pub fn p_value(p: f64) -> Value {
    if p < P_VALUE_FLOOR {
        json!("<1e-300")
    } else {
        json!(p)
    }
}

pub fn moments(summary: &MomentSummary, digits: usize) -> Value {
    json!({
        "mu": to_scientific(&summary.mu, digits),
        "sigma": sqrt_to_scientific(&summary.sigma2, digits),
        "sigma2": to_scientific(&summary.sigma2, digits),
        "mu_exact": to_fraction(&summary.mu),
        "sigma2_exact": to_fraction(&summary.sigma2),
    })
}

/// Pretty-printed with a trailing newline.
pub fn to_text(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use multiperm::{descent_moments, Multiset};

    #[test]
    fn p_value_floor() {
        assert_eq!(p_value(0.0), json!("<1e-300"));
        assert_eq!(p_value(0.5), json!(0.5));
    }

    #[test]
    fn keys_are_sorted() {
        let m = Multiset::new(vec![2, 1]).unwrap();
        let text = to_text(&moments(&descent_moments(&m), 5));
        let keys: Vec<&str> = text
            .lines()
            .filter_map(|l| l.trim().split('"').nth(1))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert!(text.contains("\"mu_exact\": \"2/3\""));
    }
}
