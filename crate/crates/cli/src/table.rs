//! Tabular results and their CSV/JSON encodings.

use std::io::Write;

use besselspec_core::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    /// Non-finite numbers; JSON has no representation for them.
    Missing(Option<()>),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        if v.is_finite() {
            Cell::Num(v)
        } else if v.is_nan() {
            Cell::Missing(None)
        } else {
            Cell::Text(if v > 0.0 { "inf".into() } else { "-inf".into() })
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// Builder that expands complex values into `name_re`, `name_im`.
#[derive(Default)]
pub struct Row(Vec<Cell>);

impl Row {
    pub fn new() -> Self {
        Row(Vec::new())
    }

    pub fn real(mut self, v: impl Into<Cell>) -> Self {
        self.0.push(v.into());
        self
    }

    pub fn complex(mut self, z: Complex64) -> Self {
        self.0.push(z.re.into());
        self.0.push(z.im.into());
        self
    }
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        let mut cols = Vec::new();
        for c in columns {
            // a trailing '*' marks a complex column
            match c.strip_suffix('*') {
                Some(base) => {
                    cols.push(format!("{base}_re"));
                    cols.push(format!("{base}_im"));
                }
                None => cols.push((*c).to_string()),
            }
        }
        Table { command: command.into(), columns: cols, rows: Vec::new(), notes: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        debug_assert_eq!(row.0.len(), self.columns.len());
        self.rows.push(row.0);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !s.is_empty() && !self.notes.contains(&s) {
            self.notes.push(s);
        }
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        for n in &self.notes {
            writeln!(out, "# {n}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => format!("{v:.16e}"),
                Cell::Text(s) => s.clone(),
                Cell::Missing(_) => "nan".into(),
            }))?;
        }
        w.flush()
    }

    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }
}
