//! Pipeline reports: JSON for machines, plain text for people.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }
}

/// Outcome of one pipeline request.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RequestReport {
    pub index: usize,
    pub subject: String,
    pub passed: bool,
    /// Certification windows; `null` means unbounded.
    pub windows: BTreeMap<String, Option<i32>>,
    pub values: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
    /// Names what failed; present exactly when `passed` is false.
    pub witness: Option<String>,
}

impl RequestReport {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub(crate) fn fail(&mut self, witness: impl Into<String>) {
        self.passed = false;
        if self.witness.is_none() {
            self.witness = Some(witness.into());
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub pipeline: String,
    pub passed: bool,
    pub requests: Vec<RequestReport>,
}

impl Report {
    pub fn new(pipeline: &str, requests: Vec<RequestReport>) -> Self {
        let passed = requests.iter().all(|r| r.passed);
        Report { pipeline: pipeline.into(), passed, requests }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{}: {}", self.pipeline, verdict(self.passed));
        for r in &self.requests {
            let _ = writeln!(out, "[{}] {} {}", r.index, verdict(r.passed), r.subject);
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "    witness: {w}");
            }
            for (k, v) in &r.values {
                let _ = writeln!(out, "    {k} = {v}");
            }
            for (k, w) in &r.windows {
                let shown = w.map_or("unbounded".to_string(), |w| w.to_string());
                let _ = writeln!(out, "    window {k}: {shown}");
            }
            for t in &r.tables {
                let _ = writeln!(out, "    table {} ({} rows)", t.name, t.rows.len());
                let _ = writeln!(out, "      {}", t.columns.join("\t"));
                for row in &t.rows {
                    let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    let _ = writeln!(out, "      {}", cells.join("\t"));
                }
            }
        }
        out
    }
}
