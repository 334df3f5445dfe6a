//! Two-column CSV view of a JSON document: one `key,value` row per leaf,
//! keys joined with dots.

use serde_json::Value;

pub fn to_csv(value: &Value) -> String {
    let mut rows = Vec::new();
    walk("", value, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, v) in rows {
        out.push_str(&k);
        out.push(',');
        out.push_str(&v);
        out.push('\n');
    }
    out
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_owned()
    } else {
        format!("{prefix}.{key}")
    }
}

fn walk(prefix: &str, value: &Value, rows: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                walk(&join(prefix, k), v, rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(&join(prefix, &i.to_string()), v, rows);
            }
        }
        Value::Number(n) => {
            let text = if n.is_f64() {
                format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN))
            } else {
                n.to_string()
            };
            rows.push((prefix.to_owned(), text));
        }
        Value::String(s) => rows.push((prefix.to_owned(), s.clone())),
        Value::Bool(b) => rows.push((prefix.to_owned(), b.to_string())),
        Value::Null => rows.push((prefix.to_owned(), String::new())),
    }
}
