//! Report records and their JSON/CSV encodings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const SCHEMA_VERSION: &str = "bergman-lab-report/1";

/// How `value` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `|value - expected| <= tol`
    Abs,
    /// `|value - expected| <= tol |expected|`
    Rel,
    /// `value <= expected + tol`
    AtMost,
    /// `value >= expected - tol`
    AtLeast,
    /// `value > expected`
    Above,
    /// `value < expected`
    Below,
}

impl Relation {
    pub fn holds(self, value: f64, expected: f64, tol: f64) -> bool {
        match self {
            Relation::Abs => (value - expected).abs() <= tol,
            Relation::Rel => (value - expected).abs() <= tol * expected.abs(),
            Relation::AtMost => value <= expected + tol,
            Relation::AtLeast => value >= expected - tol,
            Relation::Above => value > expected,
            Relation::Below => value < expected,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check_id: String,
    /// Acceptance criterion id for suite checks, the verb otherwise.
    pub criterion: String,
    pub value: f64,
    pub expected: f64,
    pub tol: f64,
    pub relation: Relation,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Set when the computation itself failed; `value` is then NaN.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    pub fn new(criterion: &str, id: &str, value: f64, expected: f64, tol: f64, relation: Relation) -> Check {
        Check {
            check_id: format!("{criterion}/{id}"),
            criterion: criterion.to_string(),
            value,
            expected,
            tol,
            relation,
            pass: value.is_finite() && relation.holds(value, expected, tol),
            note: None,
            error: None,
        }
    }

    pub fn failed(criterion: &str, id: &str, error: String) -> Check {
        Check {
            check_id: format!("{criterion}/{id}"),
            criterion: criterion.to_string(),
            value: f64::NAN,
            expected: f64::NAN,
            tol: f64::NAN,
            relation: Relation::Abs,
            pass: false,
            note: None,
            error: Some(error),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }
}

/// Named columns of numbers or strings.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: String,
    /// The fully resolved run configuration.
    pub config: Value,
    pub tables: BTreeMap<String, Table>,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Report {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            config,
            tables: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            error: None,
        }
    }

    pub fn finish(&mut self) {
        self.pass = self.error.is_none() && self.checks.iter().all(|c| c.pass);
    }

    pub fn to_json(&self) -> String {
        // Non-finite floats become null; the schema allows that for `value`.
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("check_id,criterion,value,expected,tol,relation,pass,error\n");
        for c in &self.checks {
            let relation = serde_json::to_value(c.relation).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e},{},{},{}",
                csv_field(&c.check_id),
                csv_field(&c.criterion),
                c.value,
                c.expected,
                c.tol,
                relation,
                c.pass,
                csv_field(c.error.as_deref().unwrap_or(""))
            );
        }
        for (name, table) in &self.tables {
            let _ = writeln!(out, "\n# {name}");
            out.push_str(&table.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => csv_field(s),
                        Value::Null => String::new(),
                        other => other.to_string(),
                    })
                    .collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Machine-readable description of the report, including every check id
/// the suite can emit.
pub fn report_schema() -> Value {
    let criteria: Vec<Value> = crate::suite::CRITERIA
        .iter()
        .map(|c| json!({ "criterion": c.id, "title": c.title, "check_ids": c.check_ids }))
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "report": {
            "schema_version": "string",
            "command": "string",
            "config": "object: resolved run configuration",
            "tables": "object: name -> { columns: [string], rows: [[number|string|null]] }",
            "checks": "array of check",
            "pass": "bool: every check passed and no run error",
            "error": "string, optional",
        },
        "check": {
            "check_id": "string: <criterion>/<name>",
            "criterion": "string",
            "value": "number or null when the computation failed",
            "expected": "number or null",
            "tol": "number or null",
            "relation": ["abs", "rel", "at-most", "at-least", "above", "below"],
            "pass": "bool",
            "note": "string, optional",
            "error": "string, optional",
        },
        "criteria": criteria,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations() {
        assert!(Relation::Abs.holds(1.0, 1.0 + 1e-9, 1e-8));
        assert!(!Relation::Rel.holds(2.0, 1.0, 0.5));
        assert!(Relation::AtMost.holds(1.0, 0.5, 0.5));
        assert!(!Relation::Above.holds(0.0, 0.0, 1.0));
        assert!(!Check::new("x", "nan", f64::NAN, 0.0, 1.0, Relation::AtMost).pass);
    }

    #[test]
    fn csv_quotes_fields() {
        let mut r = Report::new("t", Value::Null);
        r.checks.push(Check::failed("c", "a,b", "bad \"input\"".into()));
        let csv = r.to_csv();
        assert!(csv.contains("\"c/a,b\""));
        assert!(csv.contains("\"bad \"\"input\"\"\""));
    }
}
