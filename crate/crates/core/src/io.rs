//! CSV tables with shortest round-trip float formatting and `#` provenance
//! comments.

use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::Path;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
}

impl Cell {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Cell::F(v) => v,
            Cell::I(v) => v as f64,
            Cell::B(v) => f64::from(u8::from(v)),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:e}")
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Cell::F(v) => f.write_str(&format_f64(v)),
            Cell::I(v) => write!(f, "{v}"),
            Cell::B(v) => f.write_str(if v { "1" } else { "0" }),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, comments: &[String]) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, comments)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn write_csv_file(&self, path: &Path, comments: &[String]) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f), comments)
    }

    /// Parses a table written by [`Table::write_csv`]; every value comes back
    /// as [`Cell::F`].
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map(Cell::F)
                        .map_err(|_| Error::invalid("csv", format!("not a number: '{s}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self { columns, rows })
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Reads a configuration file; a missing file is reported as
/// `config: not found`.
pub fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::Config("not found".into()),
        _ => Error::Config(format!("{}: {e}", path.display())),
    })
}

/// Provenance lines: tool version and a SHA-256 of the inputs that produced
/// the table.
pub fn provenance(inputs: &[u8]) -> Vec<String> {
    let digest = Sha256::digest(inputs);
    vec![
        format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        format!("scenario-sha256 {}", hex::encode(digest)),
    ]
}
