use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::config::Kind;

pub const TOOL: &str = "rffb";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One table entry. Non-finite numbers are stored as text so JSON keeps
/// them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
    Null,
}

impl Value {
    pub fn num(x: f64) -> Self {
        if x.is_finite() {
            Value::Num(x)
        } else {
            Value::Text(x.to_string())
        }
    }

    pub fn int(x: impl TryInto<i64>) -> Self {
        x.try_into().map(Value::Int).unwrap_or(Value::Null)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Value::Null, Value::num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Num(x) => Some(*x),
            Value::Text(t) => t.parse().ok(),
            Value::Bool(_) | Value::Null => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(t) => Some(t),
            _ => None,
        }
    }

    fn csv_field(&self) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Int(i) => i.to_string(),
            Value::Num(x) => x.to_string(),
            Value::Text(t) => t.clone(),
            Value::Null => String::new(),
        }
    }
}

/// An asserted inequality `empirical ≤ analytic + slack` (or the reverse,
/// depending on `relation`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub relation: String,
    pub analytic: Value,
    pub empirical: Value,
    pub slack: Value,
    pub pass: bool,
}

impl Check {
    /// `empirical ≤ analytic + slack`.
    pub fn at_most(name: &str, empirical: f64, analytic: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            relation: "empirical <= analytic + slack".into(),
            analytic: Value::num(analytic),
            empirical: Value::num(empirical),
            slack: Value::num(slack),
            pass: empirical <= analytic + slack,
        }
    }

    /// `empirical ≥ analytic − slack`.
    pub fn at_least(name: &str, empirical: f64, analytic: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            relation: "empirical >= analytic - slack".into(),
            analytic: Value::num(analytic),
            empirical: Value::num(empirical),
            slack: Value::num(slack),
            pass: empirical >= analytic - slack,
        }
    }

    /// `|empirical − analytic| ≤ slack`.
    pub fn within(name: &str, empirical: f64, analytic: f64, slack: f64) -> Self {
        Self {
            name: name.into(),
            relation: "|empirical - analytic| <= slack".into(),
            analytic: Value::num(analytic),
            empirical: Value::num(empirical),
            slack: Value::num(slack),
            pass: (empirical - analytic).abs() <= slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Row {
    pub values: Vec<Value>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

impl Row {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// "pass", "fail", or "n/a" when nothing is asserted.
    pub fn verdict(&self) -> &'static str {
        if self.checks.is_empty() {
            "n/a"
        } else if self.passes() {
            "pass"
        } else {
            "fail"
        }
    }
}

/// Column names and rows of a per-trial table.
pub type Detail = (Vec<String>, Vec<Vec<Value>>);

/// The rows an experiment produces, before timing and provenance are added.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
    /// Optional per-trial detail written to a second CSV.
    pub detail: Option<Detail>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, values: Vec<Value>, checks: Vec<Check>) {
        assert_eq!(
            values.len(),
            self.columns.len(),
            "row width does not match columns"
        );
        self.rows.push(Row { values, checks });
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub kind: Kind,
    pub name: String,
    pub master_seed: u64,
    pub jobs: usize,
    pub config: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub all_pass: bool,
    pub runtime_seconds: f64,
    pub unix_time: u64,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = (usize, &Check)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.checks.iter().filter(|c| !c.pass).map(move |c| (i, c)))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read report {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("{} is not a valid report", path.display()))
    }

    pub fn save_json(&self, path: &Path) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
    }

    /// Writes the results CSV: a `#` provenance line, then the header and
    /// one line per row.
    pub fn save_csv(&self, path: &Path) -> anyhow::Result<()> {
        write_csv(
            path,
            &self.header_line(),
            &self.columns,
            self.rows.iter().map(|r| &r.values[..]),
        )
    }

    pub fn header_line(&self) -> String {
        format!("# {TOOL} {VERSION} unix_time={}", self.unix_time)
    }
}

pub fn write_csv<'a>(
    path: &Path,
    comment: &str,
    columns: &[String],
    rows: impl Iterator<Item = &'a [Value]>,
) -> anyhow::Result<()> {
    let mut file =
        fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    writeln!(file, "{comment}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(columns)?;
    for row in rows {
        w.write_record(row.iter().map(Value::csv_field))?;
    }
    w.flush()?;
    Ok(())
}

/// Everything in a CSV file after its first (provenance) line.
pub fn csv_body(text: &str) -> &str {
    match text.strip_prefix('#') {
        Some(rest) => rest.split_once('\n').map_or("", |(_, body)| body),
        None => text,
    }
}
