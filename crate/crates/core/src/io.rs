//! Text formats: sample and report CSV files, lambda grids.
//!
//! Floats are written with `{:e}`, the shortest scientific representation
//! that reads back to the same `f64`.

use std::io::{Read, Write};

use crate::estimators::RegressionSample;
use crate::{Error, Result};

fn csv_error(line: u64, message: impl Into<String>) -> Error {
    Error::Csv { line, message: message.into() }
}

fn from_csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => csv_error(line, format!("{kind:?}")),
    }
}

/// Reads samples from CSV with header `x,y`.
///
/// Errors carry the 1-based line number of the offending row.
pub fn read_samples_csv<R: Read>(reader: R) -> Result<Vec<RegressionSample>> {
    let mut rdr =
        csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).flexible(true).from_reader(reader);
    let headers = rdr.headers().map_err(from_csv_error)?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(csv_error(
            1,
            format!("expected header `x,y`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut samples = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(from_csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(csv_error(line, format!("expected 2 fields, found {}", record.len())));
        }
        let parse = |i: usize, name: &str| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|e| csv_error(line, format!("column {name}: {e} (`{}`)", &record[i])))
        };
        let x = parse(0, "x")?;
        let y = parse(1, "y")?;
        let sample = RegressionSample::new(x, y).map_err(|e| csv_error(line, e.to_string()))?;
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(samples)
}

pub fn parse_samples_csv(text: &str) -> Result<Vec<RegressionSample>> {
    read_samples_csv(text.as_bytes())
}

/// Parses a comma-separated list of positive lambdas, e.g. `1e-4,1e-3,0.01`.
pub fn parse_lambda_grid(text: &str) -> Result<Vec<f64>> {
    let grid = text
        .split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: f64 = tok.parse().map_err(|_| Error::LambdaGrid(format!("`{tok}` is not a number")))?;
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::LambdaGrid(format!("`{tok}` is not positive and finite")))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    if grid.is_empty() {
        return Err(Error::LambdaGrid("grid is empty".into()));
    }
    Ok(grid)
}

fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn finish<W: Write>(mut wtr: csv::Writer<W>) -> Result<()> {
    wtr.flush()?;
    Ok(())
}

pub fn write_samples_csv<W: Write>(w: W, samples: &[RegressionSample]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["x", "y"]).map_err(from_csv_error)?;
    for s in samples {
        wtr.write_record([sci(s.x), sci(s.y)]).map_err(from_csv_error)?;
    }
    finish(wtr)
}

/// One row of an error table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub estimator: String,
    pub param: String,
    pub n: usize,
    pub mean_l2_error: f64,
    pub std_l2_error: f64,
}

pub fn write_report_csv<W: Write>(w: W, rows: &[ReportRow]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["estimator", "param", "n", "mean_l2_error", "std_l2_error"]).map_err(from_csv_error)?;
    for r in rows {
        wtr.write_record([
            r.estimator.clone(),
            r.param.clone(),
            r.n.to_string(),
            sci(r.mean_l2_error),
            sci(r.std_l2_error),
        ])
        .map_err(from_csv_error)?;
    }
    finish(wtr)
}

/// Dense-grid plot data: `x`, `truth(x)`, `fit(x)`.
pub fn write_grid_csv<W: Write>(w: W, xs: &[f64], truth: &[f64], fit: &[f64]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["x", "truth", "fit"]).map_err(from_csv_error)?;
    for ((x, t), f) in xs.iter().zip(truth).zip(fit) {
        wtr.write_record([sci(*x), sci(*t), sci(*f)]).map_err(from_csv_error)?;
    }
    finish(wtr)
}

/// Generic table with a header and float rows.
pub fn write_table_csv<W: Write>(w: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(header).map_err(from_csv_error)?;
    for r in rows {
        wtr.write_record(r).map_err(from_csv_error)?;
    }
    finish(wtr)
}

/// Predictions on a grid: `x`, `fit(x)`.
pub fn write_predictions_csv<W: Write>(w: W, xs: &[f64], fit: &[f64]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(["x", "fit"]).map_err(from_csv_error)?;
    for (x, f) in xs.iter().zip(fit) {
        wtr.write_record([sci(*x), sci(*f)]).map_err(from_csv_error)?;
    }
    finish(wtr)
}

pub(crate) fn format_float(v: f64) -> String {
    sci(v)
}
