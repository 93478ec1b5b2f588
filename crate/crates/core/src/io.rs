//! CSV and JSON output shared by the solvers.
//!
//! Numbers are written in scientific notation with 17 significant digits so
//! every `f64` round-trips exactly.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;

use crate::error::{invalid, Result};

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a header row followed by `rows`, each already formatted.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Numeric-only table: every row is formatted with [`fmt_num`].
pub fn write_numeric_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_csv(path, header, rows.into_iter().map(|r| r.into_iter().map(fmt_num)))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(f, value)?;
    Ok(())
}

/// Reads one named numeric column from a CSV file with a header row.
pub fn read_column(path: &Path, column: &str) -> Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let idx = r
        .headers()?
        .iter()
        .position(|h| h.trim() == column)
        .ok_or_else(|| invalid(format!("column `{column}` not found in {}", path.display())))?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let cell = rec.get(idx).unwrap_or("").trim();
        let v: f64 = cell
            .parse()
            .map_err(|_| invalid(format!("non-numeric value `{cell}` in column `{column}`")))?;
        out.push(v);
    }
    Ok(out)
}
