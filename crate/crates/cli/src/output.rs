use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Number, Value};

pub const SCHEMA_VERSION: u32 = 1;
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits. The decimal
/// conversion is exact, so ties go to even. Non-finite values pass through.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let text = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    text.parse().expect("formatted float parses back")
}

/// JSON number for `x` after rounding; `null` when not finite.
pub fn num(x: f64) -> Value {
    Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
}

/// Rounds every floating-point number in `value` in place.
pub fn round_all(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => *value = num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => items.iter_mut().for_each(round_all),
        Value::Object(map) => map.values_mut().for_each(round_all),
        _ => {}
    }
}

/// The `{schema_version, params, data}` object every JSON output uses.
pub fn envelope(params: Value, data: Value) -> Value {
    let mut root = Map::new();
    root.insert("schema_version".into(), SCHEMA_VERSION.into());
    root.insert("params".into(), params);
    root.insert("data".into(), data);
    let mut root = Value::Object(root);
    round_all(&mut root);
    root
}

/// Single-line JSON, for grid exports whose row arrays would otherwise
/// spread over millions of lines.
pub fn to_compact_json(value: &Value) -> String {
    let mut text = serde_json::to_string(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

pub fn to_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

/// Scalar as it appears in text and CSV output: the JSON spelling for
/// numbers and strings without quotes.
pub fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        other => other.to_string(),
    }
}

/// One `key: value` line per leaf, nested keys joined with dots.
pub fn to_text(value: &Value) -> String {
    fn walk(prefix: &str, value: &Value, out: &mut String) {
        match value {
            Value::Object(map) => {
                for (key, child) in map {
                    let path = if prefix.is_empty() {
                        key.clone()
                    } else {
                        format!("{prefix}.{key}")
                    };
                    walk(&path, child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), child, out);
                }
            }
            leaf => {
                let _ = writeln!(out, "{prefix}: {}", scalar(leaf));
            }
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

/// CSV cell for a float; empty when not finite.
pub fn csv_num(x: f64) -> String {
    match num(x) {
        Value::Null => String::new(),
        n => n.to_string(),
    }
}

pub fn csv_flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(text.as_bytes())?;
            w.flush()
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
