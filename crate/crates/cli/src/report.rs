//! Output helpers: significant-digit rounding and sinks.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
}

/// Rounds to `digits` significant digits. Non-finite values pass through.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1), v).parse().unwrap_or(v)
}

#[derive(Debug, Clone, Copy)]
pub struct Rounder(pub usize);

impl Rounder {
    pub fn num(&self, v: f64) -> Value {
        let r = round_sig(v, self.0);
        serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
    }

    pub fn opt(&self, v: Option<f64>) -> Value {
        v.map_or(Value::Null, |v| self.num(v))
    }

    /// CSV cell; `None` and non-finite values become empty cells.
    pub fn cell(&self, v: Option<f64>) -> String {
        match v {
            Some(v) if v.is_finite() => round_sig(v, self.0).to_string(),
            _ => String::new(),
        }
    }
}

/// A file or, when `path` is absent, standard output.
pub fn open_sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn sink_name(path: Option<&Path>) -> PathBuf {
    path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf)
}

pub fn write_json(path: Option<&Path>, v: &Value) -> Result<()> {
    let name = sink_name(path);
    let mut w = open_sink(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(|e| CliError::io(&name, e.into()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&name, e))
}

/// Writes a header row and the given rows.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let name = sink_name(path);
    let w = open_sink(path)?;
    let mut wtr = csv::Writer::from_writer(w);
    let to_io = |e: csv::Error| CliError::io(&name, io::Error::other(e));
    wtr.write_record(header).map_err(to_io)?;
    for r in rows {
        wtr.write_record(r).map_err(to_io)?;
    }
    wtr.flush().map_err(|e| CliError::io(&name, e))
}

/// Flattens a JSON report of nested objects into `(section, key, value)` rows.
pub fn long_rows(v: &Value) -> Vec<Vec<String>> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<Vec<String>>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    match x {
                        Value::Object(_) | Value::Array(_) => {
                            let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                            walk(&p, x, out);
                        }
                        _ => out.push(vec![prefix.to_string(), k.clone(), scalar(x)]),
                    }
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    // arrays of named objects are keyed by their "model" field
                    let key = x.get("model").and_then(Value::as_str).map_or(i.to_string(), str::to_string);
                    walk(&format!("{prefix}.{key}"), x, out);
                }
            }
            _ => out.push(vec![prefix.to_string(), String::new(), scalar(v)]),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn significant_digits() {
        assert_eq!(round_sig(16.098765, 4), 16.1);
        assert_eq!(round_sig(-15839.8412, 6), -15839.8);
        assert_eq!(round_sig(0.000123456789, 3), 0.000123);
        assert_eq!(round_sig(0.0, 6), 0.0);
        assert!(round_sig(f64::NAN, 6).is_nan());
        assert_eq!(Rounder(6).cell(None), "");
    }

    #[test]
    fn long_format() {
        let v = json!({"n": 3, "fits": [{"model": "beta", "params": {"alpha": 1.5}}]});
        let rows = long_rows(&v);
        assert!(rows.contains(&vec!["".into(), "n".into(), "3".into()]));
        assert!(rows.contains(&vec!["fits.beta".into(), "model".into(), "beta".into()]));
        assert!(rows.contains(&vec!["fits.beta.params".into(), "alpha".into(), "1.5".into()]));
    }
}
