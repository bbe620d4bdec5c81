//! Structured pass/fail reports rendered as JSON or aligned text.
//!
//! Every harness command produces a [`Report`]: a configuration header, one
//! [`Row`] per checked item, and an overall verdict. Rendering is
//! deterministic — map keys are ordered, floats use shortest-roundtrip
//! formatting — so two runs with the same inputs produce byte-identical
//! output except for the optional wall-time field.

use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Output encoding for a rendered report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(Error::Format(format!("unknown report format {other:?}"))),
        }
    }
}

/// One checked item: a name, ordered key → value details, and a verdict.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub name: String,
    pub fields: BTreeMap<String, Value>,
    pub pass: bool,
}

impl Row {
    #[must_use]
    pub fn new(name: impl Into<String>) -> Row {
        Row { name: name.into(), fields: BTreeMap::new(), pass: true }
    }

    /// Attach a detail field (builder style).
    #[must_use]
    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Row {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    /// And a condition into the verdict.
    #[must_use]
    pub fn check(mut self, ok: bool) -> Row {
        self.pass &= ok;
        self
    }
}

/// A full command report.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub rows: Vec<Row>,
    pub pass: bool,
    /// Wall time; the single field exempt from byte-reproducibility.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    #[must_use]
    pub fn new(command: &str) -> Report {
        Report {
            command: command.to_string(),
            config: BTreeMap::new(),
            rows: Vec::new(),
            pass: true,
            elapsed_ms: None,
        }
    }

    /// Record a configuration item shown in the report header.
    pub fn config(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_string(), value.into());
    }

    pub fn push(&mut self, row: Row) {
        self.pass &= row.pass;
        self.rows.push(row);
    }

    /// Rows that failed.
    #[must_use]
    pub fn failures(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| !r.pass).collect()
    }

    #[must_use]
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            ReportFormat::Text => self.to_string(),
        }
    }
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "# {}", self.command)?;
        for (k, v) in &self.config {
            write!(f, " {k}={}", fmt_value(v))?;
        }
        writeln!(f)?;
        let name_w = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for row in &self.rows {
            let verdict = if row.pass { "PASS" } else { "FAIL" };
            write!(f, "{verdict} {:name_w$}", row.name)?;
            for (k, v) in &row.fields {
                write!(f, "  {k}={}", fmt_value(v))?;
            }
            writeln!(f)?;
        }
        let passed = self.rows.iter().filter(|r| r.pass).count();
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: {passed}/{} rows", self.command, self.rows.len())?;
        if let Some(ms) = self.elapsed_ms {
            write!(f, " ({ms} ms)")?;
        }
        writeln!(f)
    }
}
