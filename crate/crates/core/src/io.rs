//! File export: curves, envelopes and grids as CSV, metadata as JSON.
//! Every file is written to a temporary sibling and renamed into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::envelope::EnvelopeResult;
use crate::error::{Error, Result};
use crate::geometry::QuadratureGrid;
use crate::markcorr::SummaryCurve;

/// Writes `bytes` to `path` atomically (temporary file in the same
/// directory, then rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidArgument(format!("cannot serialize JSON: {e}")))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| x.to_string())
}

/// Curves in long format: `r,value,kind,flavor,missing`.
pub fn curves_csv(curves: &[&SummaryCurve]) -> String {
    let mut out = String::from("r,value,kind,flavor,missing\n");
    for c in curves {
        for (r, v) in c.r().iter().zip(&c.values) {
            let _ = writeln!(
                out,
                "{r},{},{},{},{}",
                cell(*v),
                c.kind.as_str(),
                c.meta.flavor.as_str(),
                u8::from(v.is_none())
            );
        }
    }
    out
}

pub fn write_curves_csv(path: &Path, curves: &[&SummaryCurve]) -> Result<()> {
    write_atomic(path, curves_csv(curves).as_bytes())
}

/// `r,data,lo,hi,central,missing`; a row is missing when the data value
/// or any envelope value is undefined.
pub fn envelope_csv(result: &EnvelopeResult) -> String {
    let mut out = String::from("r,data,lo,hi,central,missing\n");
    for j in 0..result.r.len() {
        let row = [result.data[j], result.lower[j], result.upper[j], result.central[j]];
        let missing = row.iter().any(Option::is_none);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            result.r[j],
            cell(row[0]),
            cell(row[1]),
            cell(row[2]),
            cell(row[3]),
            u8::from(missing)
        );
    }
    out
}

pub fn write_envelope_csv(path: &Path, result: &EnvelopeResult) -> Result<()> {
    write_atomic(path, envelope_csv(result).as_bytes())
}

/// Grid values as `cell_x,cell_y,value` at cell centers, row-major.
pub fn grid_csv(grid: &QuadratureGrid, values: &[Option<f64>]) -> Result<String> {
    if values.len() != grid.len() {
        return Err(Error::InvalidArgument(format!("{} values for {} grid cells", values.len(), grid.len())));
    }
    let mut out = String::from("cell_x,cell_y,value\n");
    for (i, v) in values.iter().enumerate() {
        let c = grid.center(i);
        let _ = writeln!(out, "{},{},{}", c.x, c.y, cell(*v));
    }
    Ok(out)
}

pub fn write_grid_csv(path: &Path, grid: &QuadratureGrid, values: &[Option<f64>]) -> Result<()> {
    write_atomic(path, grid_csv(grid, values)?.as_bytes())
}
