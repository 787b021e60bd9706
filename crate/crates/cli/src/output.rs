//! CSV, JSON and MatrixMarket writers with fixed float formatting.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use mac_stokes::sparse::CsrMatrix;
use serde_json::Value;

use crate::CliError;

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number carrying [`fmt_f64`] digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    fmt_f64(x)
        .parse::<serde_json::Number>()
        .map(Value::Number)
        .expect("formatted float is a valid JSON number")
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let to_io = |e: csv::Error| CliError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(to_io)?;
    w.write_record(header).map_err(to_io)?;
    for r in rows {
        w.write_record(r).map_err(to_io)?;
    }
    w.flush().map_err(io_err(path))
}

/// Coordinate real general format, 1-based indices.
pub fn write_matrix_market(path: &Path, m: &CsrMatrix) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
        for (i, j, v) in m.triplets() {
            writeln!(w, "{} {} {}", i + 1, j + 1, fmt_f64(v))?;
        }
        w.flush()
    };
    body().map_err(io_err(path))
}

/// Writes each named matrix to `dir/matrices/<name>.mtx`.
pub fn export_matrices(dir: &Path, mats: &[(&str, &CsrMatrix)]) -> Result<Vec<PathBuf>, CliError> {
    let sub = dir.join("matrices");
    ensure_dir(&sub)?;
    mats.iter()
        .map(|(name, m)| {
            let p = sub.join(format!("{name}.mtx"));
            write_matrix_market(&p, m).map(|_| p)
        })
        .collect()
}
