//! Rectangular result tables serialized as CSV.

use std::fmt::Write as _;
use std::io;

use crate::error::{invalid, Result};

/// Named columns of floating-point data plus `#`-prefixed provenance lines.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub provenance: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            provenance: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return invalid(format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            ));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn add_provenance(&mut self, line: impl Into<String>) {
        self.provenance.push(line.into());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Drops a column if present.
    pub fn remove_column(&mut self, name: &str) {
        if let Some(i) = self.column_index(name) {
            self.columns.remove(i);
            for row in &mut self.rows {
                row.remove(i);
            }
        }
    }

    /// CSV text: provenance comments, header, then one line per row with
    /// 12 significant digits. Lines end in `\n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{}", format_value(*v)).expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: io::Write + ?Sized>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// Twelve significant digits in scientific notation.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        // Avoid emitting "-0" so sign-of-zero noise cannot change the bytes.
        return format!("{:.11e}", 0.0);
    }
    format!("{v:.11e}")
}

/// Uniformly sampled axis including both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearAxis {
    pub start: f64,
    pub stop: f64,
    pub samples: usize,
}

impl LinearAxis {
    pub fn new(start: f64, stop: f64, samples: usize) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite()) {
            return invalid("axis bounds must be finite");
        }
        if samples == 0 || (samples > 1 && stop <= start) {
            return invalid(format!("invalid axis [{start}, {stop}] with {samples} samples"));
        }
        Ok(Self { start, stop, samples })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.samples == 1 {
            return self.start;
        }
        self.start + (self.stop - self.start) * i as f64 / (self.samples - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.value(i)).collect()
    }
}
