use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::exit::CliError;

pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub timings: Timings,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize to JSON")
}

/// Flattens `value` into `(JSON pointer, text)` rows. Floats carry 17
/// significant digits; integers, strings and booleans are written as is.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(v: &Value, path: &mut String, out: &mut Vec<(String, String)>) {
        let len = path.len();
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    path.push('/');
                    path.push_str(&k.replace('~', "~0").replace('/', "~1"));
                    walk(child, path, out);
                    path.truncate(len);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    path.push_str(&format!("/{i}"));
                    walk(child, path, out);
                    path.truncate(len);
                }
            }
            Value::Number(n) => {
                let text = match (n.as_i64(), n.as_u64(), n.as_f64()) {
                    (Some(i), _, _) => i.to_string(),
                    (_, Some(u), _) => u.to_string(),
                    (_, _, Some(x)) => format!("{x:.16e}"),
                    _ => n.to_string(),
                };
                out.push((path.clone(), text));
            }
            Value::String(s) => out.push((path.clone(), s.clone())),
            Value::Bool(b) => out.push((path.clone(), b.to_string())),
            Value::Null => out.push((path.clone(), String::new())),
        }
    }
    let mut out = Vec::new();
    walk(value, &mut String::new(), &mut out);
    out
}

fn render(report: &Report, format: Format) -> Result<Vec<u8>, CliError> {
    let io = |e: std::io::Error| CliError::Config(format!("cannot render report: {e}"));
    match format {
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(report).expect("report serializes");
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["path", "value"]).map_err(|e| io(e.into()))?;
            for (path, value) in flatten(&to_value(report)) {
                w.write_record([path, value]).map_err(|e| io(e.into()))?;
            }
            w.into_inner().map_err(|e| io(e.into_error()))
        }
    }
}

pub fn write(report: &Report, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let bytes = render(report, format)?;
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| CliError::Config(format!("cannot write report: {e}"))),
    }
}
