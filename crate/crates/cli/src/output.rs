//! Report formatting: 12-significant-digit numbers, JSON or `key: value` text.

use serde_json::{Map, Value};

/// Keys whose subtrees are state payloads and are printed at full precision.
const VERBATIM: [&str; 2] = ["state", "standard_form"];

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// A number as printed in CSV cells.
pub fn fmt12(x: f64) -> String {
    let r = round12(x);
    if r == 0.0 {
        "0".into()
    } else {
        r.to_string()
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round12(x))) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(m) => m
            .iter_mut()
            .filter(|(k, _)| !VERBATIM.contains(&k.as_str()))
            .for_each(|(_, v)| round_value(v)),
        _ => {}
    }
}

/// Builds a JSON object from `(key, value)` pairs in order.
pub fn object<I: IntoIterator<Item = (&'static str, Value)>>(pairs: I) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .filter(|(_, v)| !v.is_null())
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}

/// Renders a report: pretty JSON, or one `key: value` line per top-level entry.
pub fn render(mut report: Value, json: bool) -> String {
    round_value(&mut report);
    if json {
        return serde_json::to_string_pretty(&report).expect("reports serialize");
    }
    match &report {
        Value::Object(m) => m
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => format!("{k}: {s}"),
                other => format!("{k}: {other}"),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        other => other.to_string(),
    }
}
