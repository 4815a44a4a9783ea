//! Number formatting shared by every CSV and JSON writer.
//!
//! Floats are written with 17 significant digits in scientific notation so
//! that they round-trip exactly and do not depend on the platform formatter.

use serde_json::{Number, Value};

pub const FORMAT_VERSION: &str = "dtn-output/1";

/// 17 significant digits, e.g. `1.2345678901234567e2`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A JSON number carrying exactly the `fmt_f64` digits. Non-finite values
/// become `null`.
pub fn json_f64(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = fmt_f64(x);
    Value::Number(text.parse::<Number>().expect("formatted float is valid JSON"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for x in [0.1, -3.0e-300, 1.0 / 3.0, 6.02214076e23, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_keeps_digits() {
        let v = json_f64(0.1);
        assert_eq!(serde_json::to_string(&v).unwrap(), "1.0000000000000001e-1");
        assert_eq!(json_f64(f64::NAN), Value::Null);
    }
}
