//! JSON and CSV rendering.

use serde_json::{Map, Value};

/// `x` with 17 significant digits, '.' as decimal separator.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => n.as_f64().map(sig17).unwrap_or_default(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => quote(s),
        other => quote(&other.to_string()),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        leaf => out.push((prefix.to_string(), scalar(leaf))),
    }
}

/// `key,value` lines for every leaf of `v`, keys as dotted paths.
pub fn csv_key_value(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut s = String::from("key,value\n");
    for (k, x) in rows {
        s.push_str(&quote(&k));
        s.push(',');
        s.push_str(&x);
        s.push('\n');
    }
    s
}

/// One CSV row per object in `rows`, columns in `header` order.
pub fn csv_table(header: &[&str], rows: &[Map<String, Value>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = header
            .iter()
            .map(|h| row.get(*h).map(scalar).unwrap_or_default())
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}
