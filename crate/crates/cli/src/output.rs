use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Result of one subcommand before formatting.
pub struct Report {
    pub command: &'static str,
    pub pass: bool,
    pub result: Value,
    /// Optional row table for CSV output.
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    command: &'a str,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamp: Option<u64>,
    pass: bool,
    result: &'a Value,
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn render(report: &Report, format: Format, seed: u64, timestamp: bool) -> String {
    match format {
        Format::Json => {
            let ts = timestamp.then(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
            let env = Envelope {
                schema: SCHEMA,
                command: report.command,
                seed,
                timestamp: ts,
                pass: report.pass,
                result: &report.result,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            match &report.table {
                Some(t) => {
                    let mut header = vec!["seed".to_string()];
                    header.extend(t.header.iter().cloned());
                    w.write_record(&header).expect("in-memory write");
                    for row in &t.rows {
                        let mut r = vec![seed.to_string()];
                        r.extend(row.iter().cloned());
                        w.write_record(&r).expect("in-memory write");
                    }
                }
                None => {
                    let mut header = vec!["seed".to_string(), "pass".to_string()];
                    let mut row = vec![seed.to_string(), report.pass.to_string()];
                    if let Value::Object(map) = &report.result {
                        for (k, v) in map {
                            if !v.is_array() && !v.is_object() {
                                header.push(k.clone());
                                row.push(scalar(v));
                            }
                        }
                    }
                    w.write_record(&header).expect("in-memory write");
                    w.write_record(&row).expect("in-memory write");
                }
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
        }
        Format::Text => {
            let mut out = format!("command: {}\nseed: {seed}\npass: {}\n", report.command, report.pass);
            if let Value::Object(map) = &report.result {
                for (k, v) in map {
                    out.push_str(&format!("{k}: {}\n", scalar(v)));
                }
            }
            out
        }
    }
}
