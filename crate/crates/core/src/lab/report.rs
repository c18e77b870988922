//! Experiment reports and their CSV / JSON forms.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentKind, OutputFormat};
use crate::error::Result;

pub const REPORT_SCHEMA: &str = "caplab-report/1";

/// One table cell. Non-finite numbers are stored as `Null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
    Null,
}

impl Cell {
    pub fn num(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Null
        }
    }

    pub fn int(x: usize) -> Self {
        Cell::Int(x as i64)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Num(x) => Some(x),
            Cell::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    fn to_csv_field(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::int(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::text(s)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A judged claim with the tolerance it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, value: Option<f64>, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), pass, value: value.filter(|v| v.is_finite()), tolerance, detail: detail.into() }
    }
}

/// Per-solve record kept alongside the table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostic {
    pub case: usize,
    pub label: String,
    pub nodes: usize,
    pub iterations: usize,
    pub gap: f64,
    pub converged: bool,
    pub frostman_ok: bool,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub experiment: ExperimentKind,
    /// Set for exploratory experiments whose rows are evidence, not proof.
    pub evidence: bool,
    pub inputs: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub verdicts: Vec<Verdict>,
    pub diagnostics: Vec<SolveDiagnostic>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(experiment: ExperimentKind, inputs: ExperimentConfig, columns: &[&str]) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            experiment,
            evidence: experiment.is_evidence(),
            inputs,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            diagnostics: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn cell(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column(name).and_then(|c| self.rows.get(row).map(|r| &r[c]))
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn write_csv_to<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        wtr.write_record(&self.columns)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(Cell::to_csv_field))?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv writer emits UTF-8"))
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Writes `<dir>/<experiment>.<csv|json>` and returns the path.
pub fn emit_report(report: &Report, dir: impl AsRef<Path>, format: OutputFormat) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.{}", report.experiment.as_str(), format.extension()));
    match format {
        OutputFormat::Csv => report.write_csv_to(std::fs::File::create(&path)?)?,
        OutputFormat::Json => std::fs::write(&path, report.to_json_string()?)?,
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExperimentConfig {
        ExperimentConfig::new(ExperimentKind::Capacity)
    }

    #[test]
    fn empty_report_gives_header_only_csv() {
        let r = Report::new(ExperimentKind::Capacity, cfg(), &["a", "b"]);
        assert_eq!(r.to_csv_string().unwrap(), "a,b\r\n");
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let mut r = Report::new(ExperimentKind::Capacity, cfg(), &["m", "x"]);
        r.push_row(vec![Cell::text("[[1,0],[0,1]]"), Cell::num(0.5)]);
        assert_eq!(r.to_csv_string().unwrap(), "m,x\r\n\"[[1,0],[0,1]]\",0.5\r\n");
    }

    #[test]
    fn one_row_report_round_trips_through_json() {
        let mut r = Report::new(ExperimentKind::Capacity, cfg(), &["n", "c", "ok", "label", "missing"]);
        r.push_row(vec![Cell::int(3), Cell::num(0.1 + 0.2), Cell::Bool(true), Cell::text("x"), Cell::num(f64::NAN)]);
        r.verdicts.push(Verdict::new("v", true, Some(1.0), 1e-8, ""));
        let back = Report::from_json_str(&r.to_json_string().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
