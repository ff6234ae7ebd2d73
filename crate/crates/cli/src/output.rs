//! Column tables written as CSV or JSON.

use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};
use twistor_kepler::conventions;

use crate::config::Format;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub n: usize,
    pub seed: u64,
    pub scenario: String,
    pub conventions_hash: String,
}

/// SHA-256 of the conventions table, hex encoded.
pub fn conventions_hash() -> String {
    Sha256::digest(conventions::TABLE.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Full-precision scientific notation; parses back to the same `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(w: &mut W, table: &Table) -> std::io::Result<()> {
    writeln!(w, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    metadata: &'a Metadata,
    columns: &'a [String],
    rows: &'a [Vec<f64>],
}

pub fn write_json<W: Write>(w: &mut W, table: &Table, meta: &Metadata) -> std::io::Result<()> {
    let doc = JsonDoc {
        metadata: meta,
        columns: &table.columns,
        rows: &table.rows,
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}

pub fn write_table<W: Write>(w: &mut W, table: &Table, meta: &Metadata, format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(w, table),
        Format::Json => write_json(w, table, meta),
    }
}

/// `{prefix}_{i}_{j}_re`, `{prefix}_{i}_{j}_im` for an `n x n` matrix.
pub fn matrix_columns(prefix: &str, n: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(format!("{prefix}_{i}_{j}_re"));
            out.push(format!("{prefix}_{i}_{j}_im"));
        }
    }
    out
}

/// `{prefix}_{i}_re`, `{prefix}_{i}_im`.
pub fn vector_columns(prefix: &str, n: usize) -> Vec<String> {
    (0..n)
        .flat_map(|i| [format!("{prefix}_{i}_re"), format!("{prefix}_{i}_im")])
        .collect()
}

/// Labels matching [`twistor_kepler::dynamics::hermitian_coordinates`].
pub fn hermitian_columns(prefix: &str, n: usize) -> Vec<String> {
    let mut out: Vec<String> = (0..n).map(|i| format!("{prefix}_{i}_{i}")).collect();
    for i in 0..n {
        for j in i + 1..n {
            out.push(format!("{prefix}_{i}_{j}_re"));
            out.push(format!("{prefix}_{i}_{j}_im"));
        }
    }
    out
}
