//! Number formatting shared by the CSV and JSON writers.
//!
//! Every float leaves the library with 17 significant digits so that a value
//! read back parses to the same bits.

use serde::Serialize;
use serde_json::value::RawValue;

/// `x` in scientific notation with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of -0.0 out of reports
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// JSON number with 17 significant digits. Non-finite values become `null`.
pub fn json_num(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() {
        fmt_num(x)
    } else {
        "null".to_string()
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

/// Serde adapter: `#[serde(serialize_with = "sig17")]` on an `f64` field.
pub fn sig17<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    json_num(*x).serialize(s)
}

/// Same as [`sig17`] for `Vec<f64>` fields.
pub fn sig17_vec<S: serde::Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let raw: Vec<Box<RawValue>> = xs.iter().map(|&x| json_num(x)).collect();
    raw.serialize(s)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_bits() {
        for x in [1.0 / 3.0, std::f64::consts::PI, -2.5e-300, 6.02214076e23] {
            let back: f64 = fmt_num(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn json_numbers_parse() {
        #[derive(Serialize)]
        struct S {
            #[serde(serialize_with = "sig17")]
            v: f64,
        }
        let s = serde_json::to_string(&S { v: 0.1 }).unwrap();
        assert_eq!(s, r#"{"v":1.0000000000000001e-1}"#);
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["v"].as_f64(), Some(0.1));
        assert_eq!(json_num(f64::NAN).get(), "null");
    }
}
