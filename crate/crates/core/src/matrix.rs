//! Request-probability matrices: synthetic generators and the CSV exchange
//! format shared with external interest estimators.
//!
//! CSV layout: header `user_id,c1,...,cN`, then one row per user holding an
//! identifier followed by N decimal probabilities.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RequestMatrix;
use crate::rng::{substream, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixSource {
    /// Raw interest scores from a CSV file, normalized per row.
    FromFile { path: PathBuf },
    Uniform,
    /// Popularity falls off as `1 / rank^gamma`, rank = content index + 1.
    Zipf { gamma: f64 },
    /// Independent uniform scores per row, normalized.
    RandomRows { seed: u64 },
}

fn dims_error(m: usize, n: usize, found: &RequestMatrix) -> Error {
    Error::Dimension {
        expected: format!("{m} x {n}"),
        found: format!("{} x {}", found.users(), found.contents()),
    }
}

pub fn zipf_row(gamma: f64, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (1..=n).map(|rank| (rank as f64).powf(-gamma)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Row `u` depends only on `(seed, u)`, so growing `m` keeps earlier rows.
pub fn random_rows(seed: u64, stream: Stream, m: usize, n: usize) -> RequestMatrix {
    let rows = (0..m)
        .map(|u| {
            let mut rng = substream(seed, stream, u as u64);
            // (0, 1]: keeps every content requestable.
            let raw: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / sum).collect()
        })
        .collect();
    RequestMatrix::from_rows(rows).expect("m, n >= 1")
}

/// Produces a validated row-stochastic `m x n` matrix.
pub fn build_matrix(source: &MatrixSource, m: usize, n: usize) -> Result<RequestMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::Dimension {
            expected: "m, n >= 1".into(),
            found: format!("{m} x {n}"),
        });
    }
    let matrix = match source {
        MatrixSource::Uniform => RequestMatrix::from_rows(vec![vec![1.0 / n as f64; n]; m])?,
        MatrixSource::Zipf { gamma } => {
            if !(*gamma > 0.0 && gamma.is_finite()) {
                return Err(Error::Domain(format!("zipf gamma must be positive, got {gamma}")));
            }
            RequestMatrix::from_rows(vec![zipf_row(*gamma, n); m])?
        }
        MatrixSource::RandomRows { seed } => random_rows(*seed, Stream::RequestRow, m, n),
        MatrixSource::FromFile { path } => {
            let raw = load_matrix(path)?;
            if raw.users() != m || raw.contents() != n {
                return Err(dims_error(m, n, &raw));
            }
            raw.normalized()?
        }
    };
    debug_assert!(matrix.violations().is_empty());
    Ok(matrix)
}

pub fn save_matrix(matrix: &RequestMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = File::create(path).map_err(|e| Error::io(path, e))?;
    out.write_all(to_csv_string(matrix).as_bytes())
        .map_err(|e| Error::io(path, e))
}

/// Shortest round-trip formatting, so values survive a save/load exactly.
pub fn to_csv_string(matrix: &RequestMatrix) -> String {
    let mut text = String::from("user_id");
    for i in 1..=matrix.contents() {
        text.push_str(&format!(",c{i}"));
    }
    text.push('\n');
    for (u, row) in matrix.rows().iter().enumerate() {
        text.push_str(&(u + 1).to_string());
        for v in row {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    text
}

/// Reads a matrix CSV as-is; rows are not normalized.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<RequestMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, path)
}

fn parse_csv(reader: impl std::io::Read, path: &Path) -> Result<RequestMatrix> {
    let parse_err = |row: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        row,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| parse_err(0, e.to_string()))?,
        None => return Err(parse_err(0, "empty file".into())),
    };
    if header.get(0) != Some("user_id") {
        return Err(parse_err(0, "header must start with \"user_id\"".into()));
    }
    let n = header.len() - 1;
    for (i, name) in header.iter().skip(1).enumerate() {
        if name != format!("c{}", i + 1) {
            return Err(parse_err(0, format!("header column {} should be c{}", i + 2, i + 1)));
        }
    }
    if n == 0 {
        return Err(parse_err(0, "header names no content columns".into()));
    }

    let mut rows = Vec::new();
    for (k, rec) in records.enumerate() {
        let row = k + 1;
        let rec = rec.map_err(|e| parse_err(row, e.to_string()))?;
        if rec.len() != n + 1 {
            return Err(parse_err(
                row,
                format!("expected {} values after user_id, found {}", n, rec.len().saturating_sub(1)),
            ));
        }
        let values = rec
            .iter()
            .skip(1)
            .enumerate()
            .map(|(i, field)| {
                field.parse::<f64>().map_err(|_| {
                    parse_err(row, format!("column c{}: {field:?} is not a number", i + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(parse_err(1, "no user rows".into()));
    }
    RequestMatrix::from_rows(rows)
}
