//! Deterministic JSON and CSV output.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Rounds every non-integer number in the tree to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with rounded floats and a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let v = round_floats(serde_json::to_value(report).expect("report serializes"));
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, report: &T) -> Result<(), CliError> {
    std::fs::write(path, to_json(report)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let io = |e: &dyn std::fmt::Display| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(|e| io(&e))?;
    w.write_record(header).map_err(|e| io(&e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io(&e))?;
    }
    w.flush().map_err(|e| io(&e))
}

/// Float cell with 12 significant digits.
pub fn cell(x: f64) -> String {
    round12(x).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(2.0), 2.0);
        let v = serde_json::json!({"a": [1, 0.1234567890123456], "b": "x"});
        assert_eq!(
            round_floats(v),
            serde_json::json!({"a": [1, 0.123456789012], "b": "x"})
        );
    }
}
