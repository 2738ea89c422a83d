use std::path::{Path, PathBuf};

use roseland::io::{matrix_read, matrix_write, write_vector_csv, MatrixFormat};
use roseland::Matrix;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn out_dir(path: Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = path.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Lib(e.into()))?;
    Ok(dir)
}

/// Reads an input matrix; absent files are reported as missing input.
pub fn read_input(path: &Path, what: &str) -> CliResult<Matrix> {
    if !path.exists() {
        return Err(CliError::MissingInput(format!("{what} file {} not found", path.display())));
    }
    Ok(matrix_read(path)?)
}

pub fn read_column(path: &Path, what: &str) -> CliResult<Vec<f64>> {
    let m = read_input(path, what)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(CliError::Usage(format!(
            "{what} file {} must have one row or one column, got {}x{}",
            path.display(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.as_slice().to_vec())
}

pub fn write_csv(m: &Matrix, dir: &Path, name: &str) -> CliResult<()> {
    Ok(matrix_write(m, dir.join(name), MatrixFormat::Csv)?)
}

pub fn write_column(values: &[f64], dir: &Path, name: &str) -> CliResult<()> {
    Ok(write_vector_csv(values, dir.join(name))?)
}

pub fn write_json<T: Serialize>(value: &T, dir: &Path, name: &str) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Lib(roseland::Error::Format(e.to_string())))?;
    write_text(&(text + "\n"), dir, name)
}

pub fn write_text(text: &str, dir: &Path, name: &str) -> CliResult<()> {
    std::fs::write(dir.join(name), text).map_err(|e| CliError::Lib(e.into()))
}

/// Matrix from equal-length columns.
pub fn columns(cols: &[&[f64]]) -> CliResult<Matrix> {
    let owned: Vec<Vec<f64>> = cols.iter().map(|c| c.to_vec()).collect();
    Ok(Matrix::from_columns(&owned)?)
}
