//! Number formatting shared by reports and CSV output.

use serde_json::Value;

/// Significant digits kept in reports.
pub const REPORT_DIGITS: usize = 12;

/// `x` rounded to [`REPORT_DIGITS`] significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", REPORT_DIGITS - 1, x).parse().expect("formatted float parses");
    if r == 0.0 { 0.0 } else { r }
}

/// Shortest decimal text of `x` after rounding to [`REPORT_DIGITS`] significant digits.
pub fn sig(x: f64) -> String {
    round_sig(x).to_string()
}

/// Rounds every float in a JSON tree in place; integers are left alone.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("checked f64"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(sig(0.1 + 0.2), "0.3");
        assert_eq!(sig(-0.0), "0");
        assert_eq!(sig(1.5), "1.5");
        assert_eq!(sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(sig(-1e-20), "-0.00000000000000000001");
    }

    #[test]
    fn json_rounding_keeps_integers() {
        let mut v = serde_json::json!({"a": 0.30000000000000004, "b": [1, 2.0000000000001]});
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"a":0.3,"b":[1,2.0]}"#);
    }
}
