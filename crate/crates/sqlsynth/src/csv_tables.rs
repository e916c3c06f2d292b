//! CSV table bodies, typed by a schema from the problem manifest.
//!
//! The first record is a header that must repeat the schema's column names.
//! Empty fields are `Null`, for every column type.

use std::io::Read;
use std::path::{Path, PathBuf};

use sqlsynth_core::{ColumnSchema, Value};

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Open { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("header lists {found:?}, expected {expected:?}")]
    Header { found: Vec<String>, expected: Vec<String> },
    #[error("line {line}, column `{column}`: {message}")]
    Cell { line: u64, column: String, message: String },
}

pub fn read_rows(path: &Path, schema: &[ColumnSchema]) -> Result<Vec<Vec<Value>>, CsvError> {
    let file = std::fs::File::open(path).map_err(|source| CsvError::Open { path: path.into(), source })?;
    parse_rows(file, schema)
}

pub fn parse_rows(input: impl Read, schema: &[ColumnSchema]) -> Result<Vec<Vec<Value>>, CsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let found: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let expected: Vec<String> = schema.iter().map(|c| c.name.to_string()).collect();
    if found != expected {
        return Err(CsvError::Header { found, expected });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .zip(schema)
            .map(|(text, col)| {
                if text.is_empty() {
                    return Ok(Value::Null);
                }
                Value::parse(text, col.ctype).map_err(|e| CsvError::Cell {
                    line,
                    column: col.name.to_string(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}
