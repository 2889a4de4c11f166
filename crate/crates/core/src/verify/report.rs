use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExperimentKind, McConfig};
use crate::error::{Error, Result};

/// One pass/fail assertion of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Criterion { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// CSV rendering; floats carry 17 significant digits.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Float(v) if v.is_nan() => "nan".into(),
            Cell::Float(v) => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Comma-separated with a header row and LF line endings.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
        let csv_err = |e: csv::Error| Error::Numerical(format!("csv encoding failed: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("csv encoding failed: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Outcome of one experiment. Contains no timing information so that it is
/// a pure function of the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub experiment: ExperimentKind,
    pub version: String,
    pub config: McConfig,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
    pub tables: BTreeMap<String, Table>,
    pub summary: serde_json::Value,
}

impl McReport {
    pub(crate) fn new(
        config: &McConfig,
        criteria: Vec<Criterion>,
        tables: BTreeMap<String, Table>,
        summary: serde_json::Value,
    ) -> Self {
        McReport {
            experiment: config.experiment,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            passed: criteria.iter().all(|c| c.passed),
            criteria,
            tables,
            summary,
        }
    }

    pub fn failed_criteria(&self) -> Vec<&str> {
        self.criteria.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}
