//! Record tables on disk.
//!
//! CSV column schemas:
//!
//! | table       | columns |
//! |-------------|---------|
//! | correlator  | `seed,N,i,j,distance,t,value,kind,stream,window_lo,window_hi` |
//! | decay       | `N,distance,mean,stderr,n_samples` |
//! | sample      | `realization,N,distance,value` |
//! | spectrum    | `index,eigenvalue,in_window` |
//! | band        | `N,lo,hi` |
//! | operator    | `N,L,dim,nnz,max_row_len,edge_dim,gershgorin_lower,max_row_sum` |
//!
//! `N` is empty in decay and sample rows of sector sums. JSON tables are
//! arrays of objects with the same field names.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use xxz_core::config_space::Site;
use xxz_core::correlators::{CorrelatorKind, CorrelatorRecord};
use xxz_core::estimators::DecayRecord;
use xxz_core::spectral::SpectrumRow;

use crate::error::{io_err, schema, HarnessError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A flat row type with a fixed column order.
pub trait Table: Serialize + DeserializeOwned {
    const COLUMNS: &'static [&'static str];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatorRow {
    pub seed: u64,
    #[serde(rename = "N")]
    pub n_particles: usize,
    pub i: Site,
    pub j: Site,
    pub distance: u32,
    pub t: f64,
    pub value: f64,
    pub kind: CorrelatorKind,
    pub stream: u64,
    pub window_lo: f64,
    pub window_hi: f64,
}

impl Table for CorrelatorRow {
    const COLUMNS: &'static [&'static str] = &[
        "seed", "N", "i", "j", "distance", "t", "value", "kind", "stream", "window_lo", "window_hi",
    ];
}

impl From<&CorrelatorRecord> for CorrelatorRow {
    fn from(r: &CorrelatorRecord) -> Self {
        CorrelatorRow {
            seed: r.seed,
            n_particles: r.n_particles,
            i: r.i,
            j: r.j,
            distance: r.distance,
            t: r.t,
            value: r.value,
            kind: r.kind,
            stream: r.stream,
            window_lo: r.window_lo,
            window_hi: r.window_hi,
        }
    }
}

impl TryFrom<CorrelatorRow> for CorrelatorRecord {
    type Error = HarnessError;

    fn try_from(r: CorrelatorRow) -> Result<Self> {
        let rec = CorrelatorRecord::new(
            r.kind,
            r.seed,
            r.stream,
            r.n_particles,
            r.i,
            r.j,
            r.t,
            (r.window_lo, r.window_hi),
            r.value,
        )?;
        if rec.distance != r.distance {
            return Err(HarnessError::Config(format!(
                "distance {} does not match sites {} and {}",
                r.distance, r.i, r.j
            )));
        }
        Ok(rec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayRow {
    #[serde(rename = "N")]
    pub n_particles: Option<usize>,
    pub distance: u32,
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

impl Table for DecayRow {
    const COLUMNS: &'static [&'static str] = &["N", "distance", "mean", "stderr", "n_samples"];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRow {
    pub realization: u64,
    #[serde(rename = "N")]
    pub n_particles: Option<usize>,
    pub distance: u32,
    pub value: f64,
}

impl Table for SampleRow {
    const COLUMNS: &'static [&'static str] = &["realization", "N", "distance", "value"];
}

impl Table for SpectrumRow {
    const COLUMNS: &'static [&'static str] = &["index", "eigenvalue", "in_window"];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandRow {
    #[serde(rename = "N")]
    pub n_particles: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Table for BandRow {
    const COLUMNS: &'static [&'static str] = &["N", "lo", "hi"];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorRow {
    #[serde(rename = "N")]
    pub n_particles: usize,
    #[serde(rename = "L")]
    pub half_length: Site,
    pub dim: usize,
    pub nnz: usize,
    pub max_row_len: usize,
    pub edge_dim: usize,
    pub gershgorin_lower: f64,
    pub max_row_sum: f64,
}

impl Table for OperatorRow {
    const COLUMNS: &'static [&'static str] = &[
        "N", "L", "dim", "nnz", "max_row_len", "edge_dim", "gershgorin_lower", "max_row_sum",
    ];
}

/// Per-distance rows and per-realization rows of an ensemble record.
pub fn decay_rows(rec: &DecayRecord) -> (Vec<DecayRow>, Vec<SampleRow>) {
    let decay = rec
        .distances
        .iter()
        .zip(&rec.stats)
        .map(|(&d, s)| DecayRow {
            n_particles: rec.n_particles,
            distance: d,
            mean: s.mean,
            stderr: s.std_error(),
            n_samples: s.count,
        })
        .collect();
    let samples = rec
        .samples
        .iter()
        .enumerate()
        .flat_map(|(r, row)| {
            rec.distances.iter().zip(row).map(move |(&d, &v)| SampleRow {
                realization: r as u64,
                n_particles: rec.n_particles,
                distance: d,
                value: v,
            })
        })
        .collect();
    (decay, samples)
}

pub fn persist<T: Table>(rows: &[T], path: &Path, format: Format) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
            w.write_record(T::COLUMNS).map_err(|e| csv_err(path, e))?;
            for row in rows {
                w.serialize(row).map_err(|e| csv_err(path, e))?;
            }
            w.flush().map_err(io_err(path))?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| schema(path, e.to_string()))?;
            out.write_all(b"\n").map_err(io_err(path))?;
        }
    }
    out.flush().map_err(io_err(path))
}

/// Loads a whole table; any malformed row fails the load.
pub fn load<T: Table>(path: &Path, format: Format) -> Result<Vec<T>> {
    let file = File::open(path).map_err(io_err(path))?;
    let reader = BufReader::new(file);
    match format {
        Format::Csv => {
            let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
            let header = r.headers().map_err(|e| csv_err(path, e))?.clone();
            if header.iter().ne(T::COLUMNS.iter().copied()) {
                return Err(schema(
                    path,
                    format!("header {:?}, expected {:?}", header.iter().collect::<Vec<_>>(), T::COLUMNS),
                ));
            }
            r.deserialize()
                .enumerate()
                .map(|(k, row)| row.map_err(|e| schema(path, format!("row {}: {e}", k + 1))))
                .collect()
        }
        Format::Json => serde_json::from_reader(reader).map_err(|e| schema(path, e.to_string())),
    }
}

/// Infers the format from the file extension.
pub fn format_of(path: &Path) -> Result<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        _ => Err(schema(path, "expected a .csv or .json file")),
    }
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| schema(path, e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| schema(path, e.to_string()))
}

fn csv_err(path: &Path, e: csv::Error) -> HarnessError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => HarnessError::Io {
                path: path.to_path_buf(),
                source,
            },
            other => schema(path, format!("{other:?}")),
        }
    } else {
        schema(path, e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_columns_follow_field_order() {
        let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(vec![]);
        w.serialize(DecayRow {
            n_particles: None,
            distance: 3,
            mean: 0.5,
            stderr: 0.1,
            n_samples: 7,
        })
        .unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        assert_eq!(text, "N,distance,mean,stderr,n_samples\n,3,0.5,0.1,7\n");
    }

    #[test]
    fn formats_from_extensions() {
        assert_eq!(format_of(Path::new("a/b.csv")).unwrap(), Format::Csv);
        assert_eq!(format_of(Path::new("b.json")).unwrap(), Format::Json);
        assert!(format_of(Path::new("b.txt")).is_err());
    }
}
