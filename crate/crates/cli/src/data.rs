//! Delimited-text ingestion.
//!
//! Rows with missing or non-numeric cells, or values outside the model's
//! support, are dropped and counted rather than rejected.

use std::fs::File;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One column of ratios in (0, 1).
    Z,
    /// Two columns of positive amounts; the ratio is formed from them.
    Xy,
}

/// Which of the two selected columns is the ratio's numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Numerator {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    /// 1-based position.
    Index(usize),
    Name(String),
}

impl FromStr for ColumnRef {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        match s.parse::<usize>() {
            Ok(0) => Err("column indices are 1-based".into()),
            Ok(i) => Ok(ColumnRef::Index(i)),
            Err(_) if s.is_empty() => Err("empty column reference".into()),
            Err(_) => Ok(ColumnRef::Name(s.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: Format,
    /// Defaults to the first one (z) or two (xy) columns.
    pub columns: Vec<ColumnRef>,
    pub numerator: Numerator,
    pub delimiter: u8,
    pub header: bool,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    /// Ratios strictly inside (0, 1).
    pub z: Vec<f64>,
    /// The raw pairs, for `xy` data only.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub n_dropped: usize,
}

fn resolve(col: &ColumnRef, headers: Option<&csv::StringRecord>) -> Result<usize> {
    match col {
        ColumnRef::Index(i) => Ok(i - 1),
        ColumnRef::Name(name) => {
            let h = headers.ok_or_else(|| {
                CliError::Validation(format!("column '{name}' given by name but the file has no header"))
            })?;
            h.iter()
                .position(|c| c.trim() == name)
                .ok_or_else(|| CliError::Validation(format!("no column named '{name}'")))
        }
    }
}

fn cell(rec: &csv::StringRecord, i: usize) -> Option<f64> {
    rec.get(i)?.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

pub fn load(spec: &DatasetSpec) -> Result<Dataset> {
    let needed = match spec.format {
        Format::Z => 1,
        Format::Xy => 2,
    };
    let columns = if spec.columns.is_empty() {
        (1..=needed).map(ColumnRef::Index).collect()
    } else {
        spec.columns.clone()
    };
    if columns.len() != needed {
        return Err(CliError::Validation(format!(
            "format {:?} takes {needed} column(s), got {}",
            spec.format,
            columns.len()
        )));
    }
    let file = File::open(&spec.path).map_err(|e| CliError::io(&spec.path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(spec.header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = if spec.header {
        Some(rdr.headers().map_err(|e| CliError::Parse(format!("{}: {e}", spec.path.display())))?.clone())
    } else {
        None
    };
    let idx: Vec<usize> = columns.iter().map(|c| resolve(c, headers.as_ref())).collect::<Result<_>>()?;

    let mut out = Dataset::default();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Parse(format!("{}: {e}", spec.path.display())))?;
        match spec.format {
            Format::Z => match cell(&rec, idx[0]) {
                Some(z) if z > 0.0 && z < 1.0 => out.z.push(z),
                _ => out.n_dropped += 1,
            },
            Format::Xy => match (cell(&rec, idx[0]), cell(&rec, idx[1])) {
                (Some(x), Some(y)) if x > 0.0 && y > 0.0 => {
                    let num = match spec.numerator {
                        Numerator::First => x,
                        Numerator::Second => y,
                    };
                    let z = num / (x + y);
                    if z > 0.0 && z < 1.0 {
                        out.x.push(x);
                        out.y.push(y);
                        out.z.push(z);
                    } else {
                        out.n_dropped += 1;
                    }
                }
                _ => out.n_dropped += 1,
            },
        }
    }
    if out.z.is_empty() {
        return Err(CliError::Parse(format!(
            "{}: no usable rows ({} dropped)",
            spec.path.display(),
            out.n_dropped
        )));
    }
    Ok(out)
}
