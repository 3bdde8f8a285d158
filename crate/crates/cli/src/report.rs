//! Command reports. Every float is rounded to 12 significant digits once,
//! in the value tree; the JSON and text renderings both print that tree, so
//! they carry identical numbers.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn round_tree(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    value: Value,
}

impl Report {
    pub fn new(command: &str, input: Option<&str>, results: impl Serialize) -> Self {
        let mut results = serde_json::to_value(results).expect("report results serialize");
        round_tree(&mut results);
        let mut top = Map::new();
        top.insert("command".into(), Value::from(command));
        top.insert("input".into(), input.map_or(Value::Null, Value::from));
        top.insert("results".into(), results);
        top.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        Report {
            value: Value::Object(top),
        }
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn results(&self) -> &Value {
        &self.value["results"]
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.value).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => flatten(&self.value)
                .into_iter()
                .map(|(k, v)| format!("{k}: {v}\n"))
                .collect(),
        }
    }
}

/// `(path, scalar)` pairs in key order, with paths like `results.rows[3].pass`.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&path, child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), child, out);
                }
            }
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}
