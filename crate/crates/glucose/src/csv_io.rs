//! Dataset CSV files: a header naming the feature columns followed by
//! `glucose_mmol_l`, then one measurement per line.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use glucose_core::{Dataset, Matrix};

use crate::error::{Error, Result};

pub const GLUCOSE_COLUMN: &str = "glucose_mmol_l";

/// Canonical text for a number: rounded to 9 significant digits, then the
/// shortest representation that parses back to the rounded value.
pub fn format_number(v: f64) -> String {
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Feature rows read from a CSV, with glucose when the file carries it.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub features: Matrix,
    pub glucose: Option<Vec<f64>>,
}

fn csv_error(line: u64, message: impl Into<String>) -> Error {
    Error::Csv {
        line,
        message: message.into(),
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn map_csv(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    csv_error(line, e.to_string())
}

/// Reads a table whose glucose column is optional; without it every column
/// is a feature.
pub fn read_table<R: Read>(input: R) -> Result<FeatureTable> {
    let mut rdr = reader(input);
    let header: Vec<String> = rdr
        .headers()
        .map_err(map_csv)?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(csv_error(1, "missing header"));
    }
    let has_glucose = header.last().is_some_and(|h| h == GLUCOSE_COLUMN);
    if let Some(pos) = header.iter().position(|h| h == GLUCOSE_COLUMN) {
        if pos + 1 != header.len() {
            return Err(csv_error(
                1,
                format!("{GLUCOSE_COLUMN} must be the last column"),
            ));
        }
    }
    let k = header.len() - usize::from(has_glucose);
    if k == 0 {
        return Err(csv_error(1, "no feature columns"));
    }

    let mut data = Vec::new();
    let mut glucose = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(map_csv)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            return Err(csv_error(
                line,
                format!("expected {} columns, found {}", header.len(), record.len()),
            ));
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                csv_error(
                    line,
                    format!("column {}: {cell:?} is not a number", header[j]),
                )
            })?;
            if !v.is_finite() {
                return Err(csv_error(
                    line,
                    format!("column {}: value is not finite", header[j]),
                ));
            }
            if j < k {
                data.push(v);
            } else {
                if v <= 0.0 {
                    return Err(csv_error(
                        line,
                        format!("glucose must be positive, found {cell}"),
                    ));
                }
                glucose.push(v);
            }
        }
    }
    let rows = data.len() / k;
    let features = Matrix::new(rows, k, data)?;
    let names = header[..k].to_vec();
    Ok(FeatureTable {
        names,
        features,
        glucose: has_glucose.then_some(glucose),
    })
}

pub fn read_dataset<R: Read>(input: R) -> Result<Dataset> {
    let table = read_table(input)?;
    let glucose = table
        .glucose
        .ok_or_else(|| csv_error(1, format!("last column must be {GLUCOSE_COLUMN}")))?;
    if glucose.is_empty() {
        return Err(csv_error(1, "no data rows"));
    }
    Ok(Dataset::new(table.features, glucose, table.names)?)
}

pub fn write_dataset<W: Write>(output: W, d: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(output);
    let write_err = |e: csv::Error| csv_error(0, e.to_string());
    let header = d
        .feature_names()
        .iter()
        .map(String::as_str)
        .chain([GLUCOSE_COLUMN]);
    w.write_record(header).map_err(write_err)?;
    for (row, g) in d.features().row_iter().zip(d.glucose()) {
        let cells = row.iter().chain([g]).map(|&v| format_number(v));
        w.write_record(cells).map_err(write_err)?;
    }
    w.flush().map_err(|e| csv_error(0, e.to_string()))
}

pub fn load_table(path: &Path) -> Result<FeatureTable> {
    read_table(File::open(path).map_err(|e| Error::io(path, e))?).map_err(|e| with_path(e, path))
}

pub fn load_csv(path: &Path) -> Result<Dataset> {
    read_dataset(File::open(path).map_err(|e| Error::io(path, e))?).map_err(|e| with_path(e, path))
}

pub fn save_csv(path: &Path, d: &Dataset) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_dataset(BufWriter::new(file), d).map_err(|e| with_path(e, path))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Csv { line, message } => Error::Csv {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}
