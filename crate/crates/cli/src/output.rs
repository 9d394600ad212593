//! JSON and CSV rendering. JSON numbers keep full precision; non-finite
//! values become `null` and commands add explicit flags next to them.

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// CSV text from a header and rows of cells.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Full-precision, round-trippable float text.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub enum Output {
    Json(Value),
    /// A record with its CSV table.
    Tabular(Value, String),
    /// Raw text (graph files, functions) printed as is.
    Text(String),
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.as_f64().map(num).unwrap_or_else(|| n.to_string())),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn flatten(value: &Value) -> String {
    let mut header = Vec::new();
    let mut row = Vec::new();
    if let Value::Object(map) = value {
        for (k, v) in map {
            if let Some(cell) = scalar(v) {
                header.push(k.clone());
                row.push(cell);
            }
        }
    }
    format!("{}\n{}\n", header.join(","), row.join(","))
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Text(t), _) => t.clone(),
            (Output::Json(v) | Output::Tabular(v, _), Format::Json) => {
                let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
                s.push('\n');
                s
            }
            (Output::Json(v), Format::Csv) => flatten(v),
            (Output::Tabular(_, t), Format::Csv) => t.clone(),
        }
    }
}
