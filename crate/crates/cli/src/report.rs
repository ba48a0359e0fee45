use serde::Serialize;
use serde_json::{Map, Value};

use hsframe::io::fmt_f64;

/// Outcome of a command, mapped onto the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Accepted,
    Rejected,
    Pass,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Accepted | Status::Pass => 0,
            Status::Rejected | Status::Fail => 2,
        }
    }
}

/// A machine-readable command report.
///
/// `result` depends only on the inputs; `wall_time_s` is the only field
/// that varies between identical invocations.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub status: Status,
    pub wall_time_s: f64,
    pub result: Value,
}

impl Report {
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&normalize(value)).expect("report prints")
    }
}

/// A double as a JSON value with 17 significant digits; non-finite values
/// become the strings `"inf"`, `"-inf"` and `"nan"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        serde_json::from_str(&fmt_f64(x)).expect("formatted double is valid JSON")
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

/// Serializes `value` and rewrites every floating-point number with 17
/// significant digits.
pub fn to_value<T: Serialize>(value: &T) -> Value {
    normalize(serde_json::to_value(value).expect("serializable payload"))
}

fn normalize(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => num(n.as_f64().expect("f64 number")),
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, normalize(v)))
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(num(0.1).to_string(), "1.0000000000000001e-1");
        assert_eq!(num(f64::INFINITY), Value::String("inf".into()));
        let v = to_value(&serde_json::json!({"a": [2.0, 3], "b": {"c": 0.5}}));
        assert_eq!(
            v.to_string(),
            r#"{"a":[2.0000000000000000e+0,3],"b":{"c":5.0000000000000000e-1}}"#
        );
    }

    #[test]
    fn printed_numbers_round_trip() {
        let x = std::f64::consts::E / 7.0;
        let back: f64 = serde_json::from_str(&num(x).to_string()).unwrap();
        assert_eq!(back.to_bits(), x.to_bits());
    }
}
