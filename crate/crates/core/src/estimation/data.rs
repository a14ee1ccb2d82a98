use std::io::Read;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("column `{name}` not found; available columns: {}", available.join(", "))]
    MissingColumn {
        name: String,
        available: Vec<String>,
    },
    #[error("line {line}: column `{column}` value `{value}` is not a number")]
    Parse {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: column `{column}` value {value} must be strictly positive and finite")]
    NotPositive {
        line: u64,
        column: String,
        value: f64,
    },
    #[error("x and y have different lengths ({x} and {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("need at least 3 complete rows, got {0}")]
    TooFew(usize),
}

/// Complete `(x, y)` observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedData {
    x: Vec<f64>,
    y: Vec<f64>,
    dropped: usize,
}

fn is_missing(field: &str) -> bool {
    let f = field.trim();
    f.is_empty() || f == "NA"
}

impl PairedData {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, DataError> {
        Self::with_dropped(x, y, 0)
    }

    pub fn with_dropped(x: Vec<f64>, y: Vec<f64>, dropped: usize) -> Result<Self, DataError> {
        if x.len() != y.len() {
            return Err(DataError::LengthMismatch {
                x: x.len(),
                y: y.len(),
            });
        }
        for (column, values) in [("x", &x), ("y", &y)] {
            if let Some((i, &value)) = values
                .iter()
                .enumerate()
                .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
            {
                return Err(DataError::NotPositive {
                    line: i as u64 + 1,
                    column: column.to_string(),
                    value,
                });
            }
        }
        if x.len() < 3 {
            return Err(DataError::TooFew(x.len()));
        }
        Ok(Self { x, y, dropped })
    }

    /// Rows with a missing value (empty or `NA`) in either column are
    /// dropped and counted.
    pub fn from_csv_reader<R: Read>(reader: R, xcol: &str, ycol: &str) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| DataError::Csv {
                line: 1,
                message: e.to_string(),
            })?
            .clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| DataError::MissingColumn {
                    name: name.to_string(),
                    available: headers.iter().map(str::to_string).collect(),
                })
        };
        let (ix, iy) = (find(xcol)?, find(ycol)?);
        let (mut x, mut y, mut dropped) = (Vec::new(), Vec::new(), 0);
        for record in rdr.records() {
            let record = record.map_err(|e| DataError::Csv {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let (fx, fy) = (record.get(ix).unwrap_or(""), record.get(iy).unwrap_or(""));
            if is_missing(fx) || is_missing(fy) {
                dropped += 1;
                continue;
            }
            let parse = |field: &str, column: &str| -> Result<f64, DataError> {
                let value: f64 = field.trim().parse().map_err(|_| DataError::Parse {
                    line,
                    column: column.to_string(),
                    value: field.to_string(),
                })?;
                if value > 0.0 && value.is_finite() {
                    Ok(value)
                } else {
                    Err(DataError::NotPositive {
                        line,
                        column: column.to_string(),
                        value,
                    })
                }
            };
            x.push(parse(fx, xcol)?);
            y.push(parse(fy, ycol)?);
        }
        if x.len() < 3 {
            return Err(DataError::TooFew(x.len()));
        }
        Ok(Self { x, y, dropped })
    }

    pub fn from_csv_path(
        path: impl AsRef<Path>,
        xcol: &str,
        ycol: &str,
    ) -> Result<Self, DataError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| DataError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_csv_reader(std::io::BufReader::new(file), xcol, ycol)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn dropped(&self) -> usize {
        self.dropped
    }
}
