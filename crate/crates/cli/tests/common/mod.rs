#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

pub fn hankel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hankel")).args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Runs to stdout and parses the JSON report; panics on a non-zero exit
/// unless `expected` says otherwise.
pub fn report(args: &[&str], expected: i32) -> Value {
    let out = hankel(args);
    assert_eq!(code(&out), expected, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

pub fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report-v1.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Validates `value` against the subset of JSON Schema the shipped schema
/// uses. Returns the first violation as `pointer: message`. Unknown
/// keywords are rejected so nothing is skipped silently.
pub fn validate(root: &Value, value: &Value) -> Result<(), String> {
    check(root, root, value, "")
}

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64() || v.as_f64().is_some_and(|x| x.fract() == 0.0),
        other => panic!("unsupported type {other}"),
    }
}

fn check(root: &Value, schema: &Value, v: &Value, at: &str) -> Result<(), String> {
    let fail = |msg: String| Err(format!("{}: {msg}", if at.is_empty() { "/" } else { at }));
    let s = match schema {
        Value::Bool(true) => return Ok(()),
        Value::Bool(false) => return fail("no value allowed".into()),
        Value::Object(s) => s,
        _ => panic!("schema must be an object or boolean"),
    };
    for (key, arg) in s {
        match key.as_str() {
            "$schema" | "$id" | "title" | "$defs" => {}
            "$ref" => {
                let pointer = arg.as_str().unwrap().strip_prefix('#').expect("local $ref");
                let target = root.pointer(pointer).unwrap_or_else(|| panic!("dangling $ref {pointer}"));
                check(root, target, v, at)?;
            }
            "type" => {
                let ok = match arg {
                    Value::String(t) => type_matches(t, v),
                    Value::Array(ts) => ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
                    _ => panic!("bad type keyword"),
                };
                if !ok {
                    return fail(format!("expected type {arg}, got {v}"));
                }
            }
            "const" => {
                if v != arg {
                    return fail(format!("expected {arg}, got {v}"));
                }
            }
            "enum" => {
                if !arg.as_array().unwrap().contains(v) {
                    return fail(format!("{v} not in {arg}"));
                }
            }
            "minimum" => {
                if let Some(x) = v.as_f64() {
                    if x < arg.as_f64().unwrap() {
                        return fail(format!("{x} below minimum {arg}"));
                    }
                }
            }
            "required" => {
                if let Some(obj) = v.as_object() {
                    for name in arg.as_array().unwrap() {
                        if !obj.contains_key(name.as_str().unwrap()) {
                            return fail(format!("missing required {name}"));
                        }
                    }
                }
            }
            "properties" => {
                if let Some(obj) = v.as_object() {
                    for (name, sub) in arg.as_object().unwrap() {
                        if let Some(child) = obj.get(name) {
                            check(root, sub, child, &format!("{at}/{name}"))?;
                        }
                    }
                }
            }
            "additionalProperties" => {
                if let Some(obj) = v.as_object() {
                    let known = s.get("properties").and_then(Value::as_object);
                    for (name, child) in obj {
                        if known.is_some_and(|k| k.contains_key(name)) {
                            continue;
                        }
                        check(root, arg, child, &format!("{at}/{name}"))?;
                    }
                }
            }
            "items" => {
                if let Some(items) = v.as_array() {
                    for (i, child) in items.iter().enumerate() {
                        check(root, arg, child, &format!("{at}/{i}"))?;
                    }
                }
            }
            "anyOf" => {
                let errors: Vec<String> = arg
                    .as_array()
                    .unwrap()
                    .iter()
                    .filter_map(|sub| check(root, sub, v, at).err())
                    .collect();
                if errors.len() == arg.as_array().unwrap().len() {
                    return fail(format!("no branch of anyOf matches: [{}]", errors.join(" | ")));
                }
            }
            other => panic!("schema keyword {other:?} is not supported by the test validator"),
        }
    }
    Ok(())
}

/// Parses CSV output into `(pointer, text)` rows.
pub fn csv_rows(bytes: &[u8]) -> Vec<(String, String)> {
    let mut reader = csv::Reader::from_reader(bytes);
    assert_eq!(reader.headers().unwrap(), vec!["path", "value"]);
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect()
}
