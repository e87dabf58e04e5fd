//! Ordered key/value records rendered as JSON or single-row CSV.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::error::{CliError, CliResult};
use crate::format::num;

#[derive(Debug, Clone)]
pub enum Value {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    List(Vec<Value>),
    Record(Record),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as u64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

impl From<Record> for Value {
    fn from(x: Record) -> Self {
        Value::Record(x)
    }
}

impl<const N: usize> From<[f64; N]> for Value {
    fn from(x: [f64; N]) -> Self {
        Value::List(x.iter().map(|v| Value::Num(*v)).collect())
    }
}

impl From<Vec<Value>> for Value {
    fn from(x: Vec<Value>) -> Self {
        Value::List(x)
    }
}

/// Keys keep insertion order.
#[derive(Debug, Clone, Default)]
pub struct Record(Vec<(&'static str, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &'static str, value: impl Into<Value>) -> Self {
        self.0.push((key, value.into()));
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records always serialize");
        s.push('\n');
        s
    }

    /// Header line plus one row; nested values are rejected.
    pub fn to_csv(&self, command: &str) -> CliResult<String> {
        let mut header = Vec::new();
        let mut row = Vec::new();
        for (k, v) in &self.0 {
            header.push(k.to_string());
            row.push(match v {
                Value::Num(x) => num(*x),
                Value::Int(i) => i.to_string(),
                Value::Bool(b) => b.to_string(),
                Value::Text(t) => t.clone(),
                Value::List(_) | Value::Record(_) => {
                    return Err(CliError::Input(format!(
                        "{command} output is nested; use --format json"
                    )))
                }
            });
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header)
            .and_then(|_| w.write_record(&row))
            .map_err(csv_err)?;
        finish_csv(w)
    }
}

pub fn csv_err(e: csv::Error) -> CliError {
    CliError::Input(format!("csv: {e}"))
}

pub fn finish_csv(w: csv::Writer<Vec<u8>>) -> CliResult<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Num(x) => s.serialize_f64(*x),
            Value::Int(i) => s.serialize_u64(*i),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Text(t) => s.serialize_str(t),
            Value::List(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            Value::Record(r) => r.serialize(s),
        }
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keeps_insertion_order() {
        let r = Record::new()
            .with("zeta", 1.0)
            .with("alpha", [1.0, 2.0, 3.0]);
        let json = r.to_json();
        assert!(json.find("zeta").unwrap() < json.find("alpha").unwrap());
    }

    #[test]
    fn csv_single_row() {
        let r = Record::new().with("a", 0.5).with("b", 1e-7).with("c", true);
        assert_eq!(r.to_csv("t").unwrap(), "a,b,c\n0.5,1e-7,true\n");
        assert!(Record::new().with("v", [1.0]).to_csv("t").is_err());
    }
}
