//! `key value` reports, optionally wrapped as a JSON object.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(u64),
    Float(f64),
    Str(String),
    Bool(bool),
    Missing,
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as u64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

/// Ordered report fields. Keys ending in `_ms` are wall times.
#[derive(Debug, Default)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let map: serde_json::Map<String, serde_json::Value> =
                self.entries.iter().map(|(k, v)| (k.clone(), to_json(v))).collect();
            let mut s = serde_json::Value::Object(map).to_string();
            s.push('\n');
            return s;
        }
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = match v {
                Value::Int(i) => writeln!(out, "{k} {i}"),
                Value::Float(f) => writeln!(out, "{k} {f}"),
                Value::Str(s) => writeln!(out, "{k} {s}"),
                Value::Bool(b) => writeln!(out, "{k} {b}"),
                Value::Missing => writeln!(out, "{k} none"),
            };
        }
        out
    }
}

fn to_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Int(i) => (*i).into(),
        Value::Float(f) => serde_json::Number::from_f64(*f).map_or(serde_json::Value::String(f.to_string()), Into::into),
        Value::Str(s) => s.clone().into(),
        Value::Bool(b) => (*b).into(),
        Value::Missing => serde_json::Value::Null,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json() {
        let mut r = Report::new();
        r.push("cost", 2.5).push("ell", None::<u64>).push("ok", true).push("inf", f64::INFINITY);
        assert_eq!(r.render(false), "cost 2.5\nell none\nok true\ninf inf\n");
        assert_eq!(r.render(true), "{\"cost\":2.5,\"ell\":null,\"ok\":true,\"inf\":\"inf\"}\n");
    }
}
