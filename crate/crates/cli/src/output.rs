//! Rendering of report records as JSON, CSV or an aligned table.

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Flattens nested objects into dotted keys. Arrays stay as compact JSON,
/// null becomes the empty string.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(&key, x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Array(_) => out.push((prefix.to_string(), v.to_string())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn columns(rows: &[Vec<(String, String)>], leading: &[&str]) -> Vec<String> {
    let mut cols: Vec<String> = leading.iter().map(|s| s.to_string()).collect();
    for row in rows {
        for (k, _) in row {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

/// CSV with a header row even when there are no records.
pub fn to_csv(records: &[Value], leading: &[&str]) -> String {
    let rows: Vec<Vec<(String, String)>> = records.iter().map(flatten).collect();
    let cols = columns(&rows, leading);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&cols).expect("in-memory write");
    for row in &rows {
        let rec: Vec<&str> = cols
            .iter()
            .map(|c| row.iter().find(|(k, _)| k == c).map_or("", |(_, v)| v.as_str()))
            .collect();
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

pub fn to_json(records: &[Value]) -> String {
    let v = match records {
        [one] => one.clone(),
        many => Value::Array(many.to_vec()),
    };
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

pub fn to_table(records: &[Value]) -> String {
    let mut out = String::new();
    for (i, r) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let flat = flatten(r);
        let width = flat.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in flat {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
    }
    out
}

pub fn render(records: &[Value], format: Format, leading: &[&str]) -> String {
    match format {
        Format::Json => to_json(records),
        Format::Csv => to_csv(records, leading),
        Format::Table => to_table(records),
    }
}

/// Object with `fields` first, then the members of `rest`.
pub fn prefixed(fields: Vec<(&str, Value)>, rest: Value) -> Value {
    let mut map = Map::new();
    for (k, v) in fields {
        map.insert(k.to_string(), v);
    }
    match rest {
        Value::Object(m) => map.extend(m),
        other => {
            map.insert("value".into(), other);
        }
    }
    Value::Object(map)
}
