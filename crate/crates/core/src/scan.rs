//! Tabular scan output shared by every experiment.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// `n` evenly spaced points from `range[0]` to `range[1]` inclusive; a single point sits
/// at `range[0]`. Integer numerators keep ranges symmetric about their midpoint bit for bit.
pub fn linspace(range: [f64; 2], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![range[0]];
    }
    let (mid, half) = (0.5 * (range[0] + range[1]), 0.5 * (range[1] - range[0]));
    let m = (n as f64 - 1.0).max(1.0);
    (0..n)
        .map(|k| mid + half * ((2 * k) as f64 - m) / m)
        .collect()
}

/// Named numeric columns plus free-form metadata (source label, regime warnings,
/// fitted quantities, resolved configuration).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, Value>,
}

impl ScanResult {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        ScanResult {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    /// Appends a row; its length must match the column count.
    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::AxisMismatch(format!(
                "row of {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of the named column, top to bottom.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    /// Stores a metadata entry; values that cannot be represented in JSON are stored as null.
    pub fn set_meta(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metadata.insert(key.to_string(), v);
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.set_meta(key, value);
        self
    }

    pub fn meta(&self, key: &str) -> Option<&Value> {
        self.metadata.get(key)
    }

    /// Metadata entry read back as a number.
    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.meta(key)?.as_f64()
    }

    /// Checks every row has the column count.
    pub fn validate(&self) -> Result<()> {
        match self.rows.iter().position(|r| r.len() != self.columns.len()) {
            Some(k) => Err(Error::AxisMismatch(format!(
                "row {k} has {} values for {} columns",
                self.rows[k].len(),
                self.columns.len()
            ))),
            None => Ok(()),
        }
    }

    /// CSV with a header line, LF line endings and shortest round-trip float formatting
    /// (scientific notation for very large or small magnitudes).
    pub fn to_csv(&self) -> Result<String> {
        self.validate()?;
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| Error::io("<csv buffer>", e.into());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:?}")))
                .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::NumericalValidity(e.to_string()))
    }

    /// Parses CSV written by [`Self::to_csv`] (metadata is not part of the CSV).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let io = |e: csv::Error| Error::io("<csv buffer>", e.into());
        let columns: Vec<String> = r.headers().map_err(io)?.iter().map(String::from).collect();
        let mut scan = ScanResult::new(columns);
        for rec in r.records() {
            let rec = rec.map_err(io)?;
            let row = rec
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::NumericalValidity(format!("bad CSV value `{s}`: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            scan.push(row)?;
        }
        Ok(scan)
    }
}
