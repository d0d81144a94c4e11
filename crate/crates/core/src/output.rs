//! CSV and JSON files for scan series.
//!
//! CSV: header `param,<label>,...` with labels as in [`ColumnKey::label`],
//! numbers in shortest round-trip form, missing values as empty fields. A
//! series without observable columns is written as the header line only.
//!
//! JSON: the whole [`ScanSeries`] plus a sha256 digest of its payload. The
//! payload is the series serialized with the timestamp cleared, so two runs
//! of the same spec carry the same digest.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scan::{Column, ColumnKey, ScanSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Input(format!(
                "unknown format '{other}', expected csv or json"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonDocument {
    pub payload_sha256: String,
    pub series: ScanSeries,
}

/// Values read back from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub params: Vec<f64>,
    pub columns: Vec<Column>,
}

pub fn payload_digest(series: &ScanSeries) -> Result<String> {
    let mut s = series.clone();
    s.metadata.timestamp = None;
    let bytes = serde_json::to_vec(&s)
        .map_err(|e| Error::Consistency(format!("cannot serialize series: {e}")))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn to_json(series: &ScanSeries) -> Result<String> {
    let doc = JsonDocument {
        payload_sha256: payload_digest(series)?,
        series: series.clone(),
    };
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Consistency(format!("cannot serialize series: {e}")))
}

pub fn to_csv(series: &ScanSeries) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["param".to_string()];
    header.extend(series.columns.iter().map(|c| c.key.label()));
    let csv_err = |e: csv::Error| Error::Consistency(format!("cannot write csv: {e}"));
    w.write_record(&header).map_err(csv_err)?;
    if !series.columns.is_empty() {
        for (k, p) in series.params.iter().enumerate() {
            let mut row = vec![p.to_string()];
            row.extend(
                series
                    .columns
                    .iter()
                    .map(|c| c.values[k].map(|v| v.to_string()).unwrap_or_default()),
            );
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Consistency(format!("cannot write csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(series: &ScanSeries, format: Format) -> Result<String> {
    match format {
        Format::Csv => to_csv(series),
        Format::Json => to_json(series),
    }
}

pub fn emit(series: &ScanSeries, format: Format, path: &Path) -> Result<()> {
    let text = render(series, format)?;
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let mut f = BufWriter::new(File::create(path).map_err(io)?);
    f.write_all(text.as_bytes()).map_err(io)?;
    f.flush().map_err(io)
}

fn read_text(path: &Path) -> Result<String> {
    let mut s = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut s))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    Ok(s)
}

/// Parses a JSON document and checks its digest.
pub fn parse_json(text: &str, path: &Path) -> Result<ScanSeries> {
    let fmt = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let doc: JsonDocument = serde_json::from_str(text).map_err(|e| fmt(e.to_string()))?;
    let digest = payload_digest(&doc.series)?;
    if digest != doc.payload_sha256 {
        return Err(fmt(format!(
            "payload digest mismatch: stored {}, computed {digest}",
            doc.payload_sha256
        )));
    }
    Ok(doc.series)
}

pub fn read_json(path: &Path) -> Result<ScanSeries> {
    parse_json(&read_text(path)?, path)
}

pub fn parse_csv(text: &str, path: &Path) -> Result<CsvTable> {
    let fmt = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| fmt(e.to_string()))?.clone();
    if header.get(0) != Some("param") {
        return Err(fmt("first column must be 'param'".into()));
    }
    let mut columns = header
        .iter()
        .skip(1)
        .map(|label| {
            ColumnKey::parse(label)
                .map(|key| Column {
                    key,
                    values: Vec::new(),
                })
                .map_err(|e| fmt(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut params = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| fmt(e.to_string()))?;
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| fmt(format!("row {}: bad number '{s}'", line + 2)))
        };
        params.push(num(&rec[0])?);
        for (col, field) in columns.iter_mut().zip(rec.iter().skip(1)) {
            col.values.push(if field.is_empty() {
                None
            } else {
                Some(num(field)?)
            });
        }
    }
    Ok(CsvTable { params, columns })
}

pub fn read_csv(path: &Path) -> Result<CsvTable> {
    parse_csv(&read_text(path)?, path)
}
