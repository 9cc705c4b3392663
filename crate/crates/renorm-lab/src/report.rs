//! Report envelopes, fixed-precision JSON and atomic file writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::LabError;

/// Version of the report layout.
pub const SCHEMA: &str = "renorm-lab/report/1";

/// Exactly what produced a report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub format_version: &'static str,
    pub subcommand: String,
    pub args: Value,
}

impl RunConfig {
    pub fn new(subcommand: &str, args: &impl Serialize) -> Result<Self, LabError> {
        Ok(RunConfig { format_version: SCHEMA, subcommand: subcommand.into(), args: to_value(args)? })
    }
}

pub fn to_value(x: &impl Serialize) -> Result<Value, LabError> {
    serde_json::to_value(x).map_err(|e| LabError::Io(format!("serialization: {e}")))
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with sorted keys and every non-integer number printed with
/// 17 significant digits, so identical values give identical bytes.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => out.push_str(&u.to_string()),
            (_, Some(i)) => out.push_str(&i.to_string()),
            _ => out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// {schema, config, pass, report}.
pub fn envelope(config: &RunConfig, pass: bool, report: Value) -> Result<Value, LabError> {
    Ok(serde_json::json!({
        "schema": SCHEMA,
        "config": to_value(config)?,
        "pass": pass,
        "report": report,
    }))
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), LabError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| LabError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_seventeen_digits() {
        let v = serde_json::json!({"b": 0.1, "a": [1, -2, 2.5e-300], "c": "x\"y"});
        let s = to_json(&v);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("2.5000000000000000e-300"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
        assert_eq!(back["a"][1].as_i64(), Some(-2));
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }
}
