//! Writes data files, each stamped with the run configuration.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

pub struct OutputWriter<'a> {
    config: &'a RunConfig,
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl<'a> OutputWriter<'a> {
    pub fn new(config: &'a RunConfig) -> Result<Self, CliError> {
        let dir = config.out_dir.clone();
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io("create", &dir, e))?;
        Ok(OutputWriter {
            config,
            dir,
            written: Vec::new(),
        })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// A CSV table, written as `<stem>.csv` with a header line or as
    /// `<stem>.json` with a `config` field, per the configured format.
    pub fn table(&mut self, stem: &str, csv: &str) -> Result<(), CliError> {
        match self.config.format {
            OutputFormat::Csv => {
                let body = format!("{}{csv}", self.config.to_header());
                self.write(&format!("{stem}.csv"), &body)
            }
            OutputFormat::Json => {
                let mut doc = csv_to_json(csv);
                doc["config"] = json!(self.config);
                self.write(&format!("{stem}.json"), &pretty(&doc))
            }
        }
    }

    /// A JSON document; `config` is added at the top level.
    pub fn json(&mut self, stem: &str, mut doc: Value) -> Result<(), CliError> {
        doc["config"] = json!(self.config);
        self.write(&format!("{stem}.json"), &pretty(&doc))
    }

    /// Free-form text whose format treats `#` lines as comments.
    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let body = format!("{}{body}", self.config.to_header());
        self.write(name, &body)
    }

    /// Timing data; not part of the deterministic output set.
    pub fn raw_json(&mut self, name: &str, doc: &Value) -> Result<(), CliError> {
        self.write(name, &pretty(doc))
    }

    fn write(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_file(&path, body)?;
        self.written.push(path);
        Ok(())
    }
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::io("write", path, e))
}

fn pretty(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("json serializes");
    s.push('\n');
    s
}

/// `{"columns": [...], "rows": [[...]]}`; numeric cells become numbers,
/// empty cells null, anything else (such as `inf`) stays a string.
pub fn csv_to_json(csv: &str) -> Value {
    let mut lines = csv.lines();
    let columns: Vec<&str> = lines
        .next()
        .map(|l| l.split(',').collect())
        .unwrap_or_default();
    let rows: Vec<Value> = lines
        .map(|l| Value::Array(l.split(',').map(cell).collect()))
        .collect();
    json!({ "columns": columns, "rows": rows })
}

fn cell(s: &str) -> Value {
    if s.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = s.parse::<i64>() {
        return json!(i);
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => json!(x),
        _ => json!(s),
    }
}
