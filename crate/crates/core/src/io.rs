//! On-disk matrix formats.
//!
//! * CSV: one row per line, comma separated, `.` decimal point, `\n`
//!   terminated, no header. Values are written with the shortest decimal
//!   representation that parses back to the same `f64`.
//! * LMDF binary: `b"LMDF"`, version `u32 = 1`, rows `u64`, cols `u64`,
//!   then `rows * cols` little-endian `f64` in row-major order. All header
//!   integers are little-endian, so the header is 24 bytes.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const LMDF_MAGIC: &[u8; 4] = b"LMDF";
pub const LMDF_VERSION: u32 = 1;
pub const LMDF_HEADER_LEN: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Csv,
    Bin,
}

impl MatrixFormat {
    /// Guesses the format from a file extension (`.bin`/`.lmdf` are binary).
    pub fn from_path(path: &Path) -> MatrixFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") | Some("lmdf") => MatrixFormat::Bin,
            _ => MatrixFormat::Csv,
        }
    }
}

/// Reads a matrix, detecting the binary format by its magic bytes.
pub fn matrix_read(path: impl AsRef<Path>) -> Result<Matrix> {
    let bytes = fs::read(path.as_ref())?;
    if bytes.starts_with(LMDF_MAGIC) {
        decode_lmdf(&bytes)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::Format("file is neither LMDF nor UTF-8 CSV".into()))?;
        parse_csv(text)
    }
}

pub fn matrix_write(m: &Matrix, path: impl AsRef<Path>, format: MatrixFormat) -> Result<()> {
    let file = fs::File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    match format {
        MatrixFormat::Csv => w.write_all(encode_csv(m).as_bytes())?,
        MatrixFormat::Bin => w.write_all(&encode_lmdf(m))?,
    }
    w.flush()?;
    Ok(())
}

pub fn encode_csv(m: &Matrix) -> String {
    let mut out = String::with_capacity(m.rows() * m.cols() * 12);
    for row in m.row_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_f64(*v));
        }
        out.push('\n');
    }
    out
}

/// Shortest round-tripping decimal form; `-0.0` is written as `-0`.
pub fn format_f64(v: f64) -> String {
    format!("{v}")
}

pub fn parse_csv(text: &str) -> Result<Matrix> {
    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    for (lineno, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0usize;
        for tok in line.split(',') {
            let tok = tok.trim();
            let v: f64 = tok.parse().map_err(|_| {
                Error::Format(format!("line {}: non-numeric token {tok:?}", lineno + 1))
            })?;
            if !v.is_finite() {
                return Err(Error::Value(format!(
                    "line {}: non-finite value {tok:?}",
                    lineno + 1
                )));
            }
            data.push(v);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(c) if c != count => {
                return Err(Error::Format(format!(
                    "line {}: ragged row with {count} fields, expected {c}",
                    lineno + 1
                )))
            }
            _ => {}
        }
        rows += 1;
    }
    Matrix::new(rows, cols.unwrap_or(0), data)
}

pub fn encode_lmdf(m: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(LMDF_HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(LMDF_MAGIC);
    out.extend_from_slice(&LMDF_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_lmdf(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < LMDF_HEADER_LEN || &bytes[..4] != LMDF_MAGIC {
        return Err(Error::Format("missing LMDF header".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != LMDF_VERSION {
        return Err(Error::Format(format!("unsupported LMDF version {version}")));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    if rows == 0 || cols == 0 {
        return Err(Error::Format(format!("degenerate LMDF shape {rows}x{cols}")));
    }
    let expected = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(LMDF_HEADER_LEN as u64))
        .ok_or_else(|| Error::Format("LMDF shape overflows".into()))?;
    if expected != bytes.len() as u64 {
        return Err(Error::Format(format!(
            "LMDF payload is {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let data = bytes[LMDF_HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Matrix::new(rows as usize, cols as usize, data)
}

/// Writes a single column of values as CSV (one value per line).
pub fn write_vector_csv(values: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let m = Matrix::new(values.len(), 1, values.to_vec())?;
    matrix_write(&m, path, MatrixFormat::Csv)
}

/// Reads a matrix and flattens it to a vector; accepts one row or one column.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m = matrix_read(path)?;
    if m.cols() == 1 || m.rows() == 1 {
        Ok(m.into_vec())
    } else {
        Err(Error::Dim(format!(
            "expected a vector, found a {}x{} matrix",
            m.rows(),
            m.cols()
        )))
    }
}
