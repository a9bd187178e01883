//! Report records and their JSON, CSV and human renderings.

use serde::Serialize;
use serde_json::{json, Value};

use numrange::{Matrix, C64};

/// Every number in a report travels with its exact/heuristic flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Flagged {
    pub value: f64,
    pub exact: bool,
}

impl Flagged {
    pub fn new(value: f64, exact: bool) -> Self {
        Flagged { value, exact }
    }

    pub fn exact(value: f64) -> Self {
        Flagged { value, exact: true }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ReportItem {
    pub target: String,
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Flagged>,
    /// Exact rational form of `value` when one is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<Flagged>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    /// Which computation produced the value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportItem {
    pub fn new(target: &str, quantity: &str) -> Self {
        ReportItem {
            target: target.to_string(),
            quantity: quantity.to_string(),
            ..Default::default()
        }
    }

    pub fn failed(target: &str, quantity: &str, err: impl std::fmt::Display) -> Self {
        ReportItem {
            error: Some(err.to_string()),
            ..ReportItem::new(target, quantity)
        }
    }

    pub fn value(mut self, value: f64, exact: bool) -> Self {
        self.value = Some(Flagged::new(value, exact));
        self
    }

    pub fn method(mut self, m: &str) -> Self {
        self.method = Some(m.to_string());
        self
    }

    pub fn witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub targets: Vec<String>,
    pub seed: String,
    pub tolerance: Flagged,
    pub budget: Flagged,
    pub items: Vec<ReportItem>,
    pub wall_time_ms: Flagged,
}

/// Real numbers as JSON numbers, complex ones as `[re, im]`.
pub fn scalar_json(c: C64) -> Value {
    if c.im == 0.0 {
        json!(c.re)
    } else {
        json!([c.re, c.im])
    }
}

pub fn vector_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|c| scalar_json(*c)).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| vector_json(m.row(i))).collect())
}

/// A witness object whose numbers share one flag.
pub fn witness(exact: bool, fields: Vec<(&str, Value)>) -> Value {
    let mut o = serde_json::Map::new();
    o.insert("exact".into(), Value::Bool(exact));
    for (k, v) in fields {
        o.insert(k.into(), v);
    }
    Value::Object(o)
}

pub fn render_json(r: &Report) -> String {
    serde_json::to_string_pretty(r).expect("report serializes") + "\n"
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn flag(exact: bool) -> &'static str {
    if exact {
        "exact"
    } else {
        "heuristic"
    }
}

pub fn render_csv(r: &Report) -> String {
    let mut out = String::from("command,targets,value,flag,margin,verdict,seed\n");
    for it in &r.items {
        let target = if it.quantity.is_empty() || it.quantity == r.command || it.quantity == "inequality" {
            it.target.clone()
        } else {
            format!("{}:{}", it.target, it.quantity)
        };
        let row = [
            csv_field(&r.command),
            csv_field(&target),
            it.value.map(|f| num(f.value)).unwrap_or_default(),
            it.value.map(|f| flag(f.exact).to_string()).unwrap_or_else(|| if it.error.is_some() { "error".into() } else { String::new() }),
            it.margin.map(|f| num(f.value)).unwrap_or_default(),
            csv_field(it.verdict.as_deref().unwrap_or("")),
            r.seed.clone(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn render_human(r: &Report) -> String {
    let mut out = format!("{} [{}] seed {}\n", r.command, r.targets.join(", "), r.seed);
    for it in &r.items {
        out.push_str(&format!("  {} {}", it.target, it.quantity));
        if let Some(v) = it.value {
            out.push_str(&format!(" = {} ({})", v.value, flag(v.exact)));
        }
        if let Some(q) = &it.rational {
            out.push_str(&format!(" = {q}"));
        }
        if let Some(m) = it.margin {
            out.push_str(&format!(", margin {:e} ({})", m.value, flag(m.exact)));
        }
        if let Some(v) = &it.verdict {
            out.push_str(&format!(", {v}"));
        }
        if let Some(m) = &it.method {
            out.push_str(&format!(" via {m}"));
        }
        if let Some(e) = &it.error {
            out.push_str(&format!(" error: {e}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("  wall time {:.1} ms\n", r.wall_time_ms.value));
    out
}
