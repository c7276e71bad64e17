//! Row data as it appears in the CSV: cells are stored already formatted,
//! so checks evaluated at emission and on re-reading see identical values.

use std::io::{Read, Write};

use crate::error::{LabError, LabResult};

/// 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

/// A cell value before formatting.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(n) => n.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::I(n as i64)
    }
}

impl From<i32> for Cell {
    fn from(n: i32) -> Self {
        Cell::I(i64::from(n))
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::I(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::S(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends a row given as `(column, value)` pairs in column order.
    pub fn push(&mut self, row: Vec<(&str, Cell)>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        for ((name, _), col) in row.iter().zip(&self.columns) {
            assert_eq!(name, col, "row cells out of header order");
        }
        self.rows.push(row.into_iter().map(|(_, c)| c.render()).collect());
    }

    pub fn has(&self, column: &str) -> bool {
        self.columns.iter().any(|c| c == column)
    }

    fn index(&self, column: &str) -> LabResult<usize> {
        self.columns
            .iter()
            .position(|c| c == column)
            .ok_or_else(|| LabError::Parse(format!("missing column '{column}'")))
    }

    pub fn raw(&self, row: usize, column: &str) -> LabResult<&str> {
        Ok(&self.rows[row][self.index(column)?])
    }

    fn bad(&self, row: usize, column: &str, what: &str) -> LabError {
        // header is line 1
        LabError::Parse(format!("line {}, column '{column}': expected {what}", row + 2))
    }

    pub fn f64(&self, row: usize, column: &str) -> LabResult<f64> {
        let s = self.raw(row, column)?;
        s.parse().map_err(|_| self.bad(row, column, "a number"))
    }

    pub fn i64(&self, row: usize, column: &str) -> LabResult<i64> {
        let s = self.raw(row, column)?;
        s.parse().map_err(|_| self.bad(row, column, "an integer"))
    }

    pub fn bool(&self, row: usize, column: &str) -> LabResult<bool> {
        let s = self.raw(row, column)?;
        s.parse().map_err(|_| self.bad(row, column, "true or false"))
    }

    pub fn str(&self, row: usize, column: &str) -> LabResult<&str> {
        self.raw(row, column)
    }

    pub fn column_f64(&self, column: &str) -> LabResult<Vec<f64>> {
        (0..self.len()).map(|r| self.f64(r, column)).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> LabResult<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        let wrap = |e: csv::Error| LabError::Parse(e.to_string());
        w.write_record(&self.columns).map_err(wrap)?;
        for row in &self.rows {
            w.write_record(row).map_err(wrap)?;
        }
        w.flush().map_err(|e| LabError::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> LabResult<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let wrap = |e: csv::Error| {
            // the reader's line counter lags by one on CRLF input; records
            // never span lines here, so the record index is exact
            let at = e.position().map(|p| format!("line {}: ", p.record() + 1)).unwrap_or_default();
            LabError::Parse(format!("{at}{e}"))
        };
        let columns: Vec<String> = r.headers().map_err(wrap)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(wrap)?.iter().map(str::to_string).collect());
        }
        Ok(Table { columns, rows })
    }
}
