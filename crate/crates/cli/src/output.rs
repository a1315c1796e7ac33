//! Report rendering as text, versioned JSON or CSV.

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    NotFound,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub value: Value,
    pub text: String,
    /// Rows for CSV output; top-level fields of `value` otherwise.
    pub table: Option<Table>,
}

impl Report {
    pub fn new(command: &str, value: impl Serialize, text: String) -> Result<Self> {
        Ok(Report {
            command: command.to_string(),
            status: Status::Ok,
            value: serde_json::to_value(value)?,
            text,
            table: None,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn not_found(mut self) -> Self {
        self.status = Status::NotFound;
        self
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Text => {
                let mut t = self.text.clone();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
            Format::Json => {
                let doc = json!({
                    "schema": SCHEMA,
                    "command": self.command,
                    "status": self.status,
                    "result": self.value,
                });
                serde_json::to_string_pretty(&doc)? + "\n"
            }
            Format::Csv => {
                let table = match &self.table {
                    Some(t) => t.clone(),
                    None => fields_table(&self.value),
                };
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.header)?;
                for r in &table.rows {
                    w.write_record(r)?;
                }
                String::from_utf8(w.into_inner()?)?
            }
        })
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One `field,value` row per top-level field.
fn fields_table(v: &Value) -> Table {
    let mut t = Table::new(&["field", "value"]);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                t.row(vec![k.clone(), cell(x)]);
            }
        }
        other => t.row(vec!["value".into(), cell(other)]),
    }
    t
}

/// The JSON error document printed for failed runs.
pub fn error_document(command: &str, kind: &str, message: &str, extra: Value) -> String {
    let doc = json!({
        "schema": SCHEMA,
        "command": command,
        "status": "error",
        "error": { "kind": kind, "message": message, "detail": extra },
    });
    serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        let r = Report::new("x", json!({"a": 1, "b": "t,u"}), "hello".into()).unwrap();
        assert_eq!(r.render(Format::Text).unwrap(), "hello\n");
        let j: Value = serde_json::from_str(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(j["schema"], 1);
        assert_eq!(j["status"], "ok");
        assert_eq!(j["result"]["a"], 1);
        assert_eq!(r.render(Format::Csv).unwrap(), "field,value\na,1\nb,\"t,u\"\n");
        let mut t = Table::new(&["n"]);
        t.row(vec!["5".into()]);
        assert_eq!(r.with_table(t).render(Format::Csv).unwrap(), "n\n5\n");
    }
}
