//! Numeric CSV tables: comma separated, header row required, `.` decimals.

use std::path::Path;

use loire::{DenseMatrix, DenseVector};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn read(path: &Path) -> CliResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::from_reader(file, &path.display().to_string())
    }

    /// `origin` prefixes diagnostics, normally the file name.
    pub fn from_reader(reader: impl std::io::Read, origin: &str) -> CliResult<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let columns: Vec<String> = rdr
            .headers()
            .map_err(|e| csv_error(origin, e))?
            .iter()
            .map(str::to_string)
            .collect();
        if columns.is_empty() || columns.iter().all(String::is_empty) {
            return Err(CliError::data(format!("{origin}: missing header row")));
        }
        let mut rows = Vec::new();
        for record in rdr.records() {
            let record = record.map_err(|e| csv_error(origin, e))?;
            let line = record.position().map_or(0, |p| p.line());
            let mut row = Vec::with_capacity(columns.len());
            for (field, name) in record.iter().zip(&columns) {
                let v: f64 = field.parse().map_err(|_| {
                    CliError::data(format!(
                        "{origin}:{line}: column '{name}': '{field}' is not a number"
                    ))
                })?;
                if !v.is_finite() {
                    return Err(CliError::data(format!(
                        "{origin}:{line}: column '{name}': value '{field}' is not finite"
                    )));
                }
                row.push(v);
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(CliError::data(format!("{origin}: no data rows")));
        }
        Ok(Self { columns, rows })
    }

    pub fn column_index(&self, name: &str) -> CliResult<usize> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| {
            CliError::usage(format!(
                "no column named '{name}'; available: {}",
                self.columns.join(", ")
            ))
        })
    }

    /// Splits into a design matrix and a response. Predictors keep their
    /// file order; `intercept` appends a column of ones.
    pub fn design(&self, target: &str, intercept: bool) -> CliResult<Design> {
        let t = self.column_index(target)?;
        let mut names: Vec<String> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != t)
            .map(|(_, c)| c.clone())
            .collect();
        if intercept {
            names.push("(intercept)".to_string());
        }
        if names.is_empty() {
            return Err(CliError::usage(
                "no predictor columns; add --intercept to fit a constant",
            ));
        }
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| {
                let mut out: Vec<f64> = r
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != t)
                    .map(|(_, v)| *v)
                    .collect();
                if intercept {
                    out.push(1.0);
                }
                out
            })
            .collect();
        let y: Vec<f64> = self.rows.iter().map(|r| r[t]).collect();
        Ok(Design {
            a: DenseMatrix::from_rows(&rows)?,
            y: DenseVector::from_vec(y)?,
            predictors: names,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Design {
    pub a: DenseMatrix,
    pub y: DenseVector,
    pub predictors: Vec<String>,
}

fn csv_error(origin: &str, e: csv::Error) -> CliError {
    let line = match e.kind() {
        csv::ErrorKind::UnequalLengths { pos: Some(p), .. } => Some(p.line()),
        csv::ErrorKind::Utf8 { pos: Some(p), .. } => Some(p.line()),
        csv::ErrorKind::Deserialize { pos: Some(p), .. } => Some(p.line()),
        _ => e.position().map(|p| p.line()),
    };
    let detail = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} fields, found {len}"),
        _ => e.to_string(),
    };
    match line {
        Some(l) => CliError::data(format!("{origin}:{l}: {detail}")),
        None => CliError::data(format!("{origin}: {detail}")),
    }
}
