//! JSON reports with fixed float precision.

use serde::Serialize;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    normalize(serde_json::to_value(x).expect("report types serialize"))
}

pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub passed: bool,
}

impl Report {
    pub fn render(&self) -> String {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "seed": self.seed,
            "inputs": normalize(Value::Object(self.inputs.clone())),
            "result": self.result,
            "passed": self.passed,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round_sig(1.1939603075873986), 1.19396030759);
        assert_eq!(round_sig(-2.5e-17), -2.5e-17);
        assert_eq!(round_sig(1.0 / 3.0).to_string(), "0.333333333333");
        let v = to_value(&vec![std::f64::consts::PI, f64::NAN]);
        assert_eq!(v.to_string(), "[3.14159265359,null]");
    }
}
