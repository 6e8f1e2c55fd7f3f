//! CSV input and output, vendored datasets and run manifests.
//!
//! All numbers are written with 17 significant digits so that output files
//! round-trip exactly and repeated runs are byte-comparable.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::biasstudy::StudyResult;
use crate::boottest::{ExceedanceReport, TestBands};
use crate::error::{Error, Result};
use crate::localreg::{CurveEstimate, Method, TimeSeries};

/// Format with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Which column of a CSV file holds the series.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ColumnSpec {
    /// First column, no header row.
    #[default]
    First,
    /// Zero-based column index, no header row.
    Index(usize),
    /// Column with this header name; the first row is the header.
    Named(String),
}

impl ColumnSpec {
    /// A number selects by index, anything else by header name.
    pub fn parse(s: &str) -> ColumnSpec {
        match s.parse::<usize>() {
            Ok(i) => ColumnSpec::Index(i),
            Err(_) => ColumnSpec::Named(s.to_string()),
        }
    }
}

pub fn parse_series(text: &str, column: &ColumnSpec, origin: &Path) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |row: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        row,
        message,
    };

    let mut records = reader.records().enumerate();
    let index = match column {
        ColumnSpec::First => 0,
        ColumnSpec::Index(i) => *i,
        ColumnSpec::Named(name) => {
            let (_, header) = records
                .next()
                .ok_or_else(|| parse_err(1, "missing header row".into()))?;
            let header = header?;
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| parse_err(1, format!("no column named `{name}`")))?
        }
    };

    let mut values = Vec::new();
    for (i, record) in records {
        let row = i + 1;
        let record = record?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let cell = record
            .get(index)
            .ok_or_else(|| parse_err(row, format!("row has no column {index}")))?;
        let v: f64 = cell
            .parse()
            .map_err(|_| parse_err(row, format!("`{cell}` is not a number")))?;
        if !v.is_finite() {
            return Err(parse_err(row, format!("`{cell}` is not finite")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(parse_err(1, "file contains no values".into()));
    }
    TimeSeries::new(values)
}

pub fn read_series(path: &Path, column: &ColumnSpec) -> Result<TimeSeries> {
    let text = fs::read_to_string(path)?;
    parse_series(&text, column, path)
}

/// One value per row, no header.
pub fn write_series(out: &mut impl Write, series: &TimeSeries) -> Result<()> {
    for v in series.values() {
        writeln!(out, "{}", fmt_f64(*v))?;
    }
    Ok(())
}

/// Columns `z, ghat, defined`.
pub fn write_curve(out: &mut impl Write, curve: &CurveEstimate) -> Result<()> {
    writeln!(out, "z,ghat,defined")?;
    for (z, g) in curve.iter() {
        writeln!(
            out,
            "{},{},{}",
            fmt_f64(z),
            fmt_opt(g),
            u8::from(g.is_some())
        )?;
    }
    Ok(())
}

/// Columns `z, observed, lower, upper, outside`.
pub fn write_bands(
    out: &mut impl Write,
    observed: &CurveEstimate,
    bands: &TestBands,
    report: &ExceedanceReport,
) -> Result<()> {
    if observed.grid != bands.grid {
        return Err(Error::GridMismatch);
    }
    writeln!(out, "z,observed,lower,upper,outside")?;
    for (j, (z, g)) in observed.iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(z),
            fmt_opt(g),
            fmt_opt(bands.lower[j]),
            fmt_opt(bands.upper[j]),
            u8::from(report.outside[j])
        )?;
    }
    Ok(())
}

/// Columns `z, method, bias, mae, b_ghat, err, combination, defined_count`.
/// Decomposition columns are filled on the sharpened rows when available.
pub fn write_study(out: &mut impl Write, result: &StudyResult) -> Result<()> {
    writeln!(
        out,
        "z,method,bias,mae,b_ghat,err,combination,defined_count"
    )?;
    let grid = result.config.grid.points();
    for (j, z) in grid.iter().enumerate() {
        for summary in &result.methods {
            let dec = result
                .decomposition
                .as_ref()
                .filter(|_| summary.method == Method::Sharpened);
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt_f64(*z),
                summary.method,
                fmt_opt(summary.bias.values[j]),
                fmt_opt(summary.mae.values[j]),
                fmt_opt(dec.and_then(|d| d.b_ghat[j])),
                fmt_opt(dec.and_then(|d| d.err[j])),
                fmt_opt(dec.and_then(|d| d.combination[j])),
                summary.bias.defined_count[j]
            )?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: &'static str,
    pub values: TimeSeries,
    pub first_year: i32,
    pub provenance: &'static str,
}

pub const DATASET_NAMES: [&str; 2] = ["earthquakes", "lynx"];

const LYNX_CSV: &str = include_str!("../data/lynx.csv");
const EARTHQUAKES_URL: &str = "https://online.stat.psu.edu/stat501/book/export/html/995";

/// Location where the earthquake counts are looked up.
pub fn earthquakes_path() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data/earthquakes.csv"))
}

fn parse_year_count(text: &str, origin: &Path) -> Result<(i32, TimeSeries)> {
    let values = parse_series(text, &ColumnSpec::Named("count".into()), origin)?;
    let years = parse_series(text, &ColumnSpec::Named("year".into()), origin)?;
    Ok((years.values()[0] as i32, values))
}

pub fn bundled_dataset(name: &str) -> Result<Dataset> {
    match name {
        "lynx" => {
            let (first_year, values) = parse_year_count(LYNX_CSV, Path::new("data/lynx.csv"))?;
            Ok(Dataset {
                name: "lynx",
                values,
                first_year,
                provenance: "Annual Canadian lynx trappings, Mackenzie River district, 1821-1934 \
                             (the `lynx` series distributed with R's datasets package). Raw counts; \
                             take square roots before fitting.",
            })
        }
        "earthquakes" => {
            let path = earthquakes_path();
            let text = fs::read_to_string(&path).map_err(|_| Error::DatasetUnavailable {
                name: name.into(),
                path: path.clone(),
                source_url: EARTHQUAKES_URL.into(),
            })?;
            let (first_year, values) = parse_year_count(&text, &path)?;
            Ok(Dataset {
                name: "earthquakes",
                values,
                first_year,
                provenance: "Annual number of worldwide earthquakes of magnitude above 7, 1916-2015 \
                             (Penn State STAT 501 course data, https://online.stat.psu.edu/stat501/book/export/html/995).",
            })
        }
        other => Err(Error::UnknownDataset {
            name: other.into(),
            available: DATASET_NAMES.join(", "),
        }),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Checksum of a series' values in their 17-digit text form.
pub fn series_checksum(series: &TimeSeries) -> String {
    let mut buf = Vec::new();
    write_series(&mut buf, series).expect("writing to memory");
    sha256_hex(&buf)
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub subcommand: String,
    /// Full argument list after the program name.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub input_checksum: Option<String>,
    pub output_checksum: String,
}

impl RunManifest {
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, col: ColumnSpec) -> Result<TimeSeries> {
        parse_series(text, &col, Path::new("test.csv"))
    }

    #[test]
    fn reads_single_column() {
        assert_eq!(
            parse("1\n2\n3\n", ColumnSpec::First).unwrap().values(),
            &[1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn skips_header_of_named_column() {
        let s = parse("value\n1.5\n-2\n3e1\n", ColumnSpec::Named("value".into())).unwrap();
        assert_eq!(s.values(), &[1.5, -2.0, 30.0]);
        let s = parse(
            "year,value\n2000,1\n2001,2\n2002,4\n",
            ColumnSpec::Named("value".into()),
        )
        .unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 4.0]);
        assert!(parse("a\n1\n2\n3\n", ColumnSpec::Named("b".into())).is_err());
    }

    #[test]
    fn reports_bad_row() {
        match parse("1\nabc\n", ColumnSpec::First) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
        match parse("x,y\n1,2\n3\n", ColumnSpec::Index(1)) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_input() {
        assert!(matches!(
            parse("", ColumnSpec::First),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn lynx_is_bundled() {
        let d = bundled_dataset("lynx").unwrap();
        assert_eq!(d.values.len(), 114);
        assert_eq!(d.first_year, 1821);
        assert_eq!(d.values.values()[0], 269.0);
        assert_eq!(*d.values.values().last().unwrap(), 3396.0);
    }

    #[test]
    fn unknown_dataset_lists_names() {
        let msg = bundled_dataset("sunspots").unwrap_err().to_string();
        assert!(msg.contains("earthquakes") && msg.contains("lynx"));
    }

    #[test]
    fn curve_csv_layout() {
        use crate::kernels::KernelFamily;
        use crate::localreg::{estimate_curve, EstimatorKind, EstimatorSpec, Grid};
        let s = TimeSeries::new(vec![0.1, 0.4, 0.2, 0.5, 0.3]).unwrap();
        let spec = EstimatorSpec::new(
            EstimatorKind::LocalConstant,
            KernelFamily::Epanechnikov,
            0.2,
        )
        .unwrap();
        let c = estimate_curve(&s, &Grid::new(vec![0.2, 9.0]).unwrap(), &spec).unwrap();
        let mut buf = Vec::new();
        write_curve(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "z,ghat,defined");
        assert!(lines[1].ends_with(",1"));
        assert_eq!(lines[2], "9.0000000000000000e0,,0");
    }

    #[test]
    fn manifest_path() {
        assert_eq!(
            RunManifest::path_for(Path::new("out/curve.csv")),
            PathBuf::from("out/curve.csv.manifest.json")
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn write_read_round_trip(values in prop::collection::vec(-1e12f64..1e12, 3..40)) {
                let s = TimeSeries::new(values).unwrap();
                let mut buf = Vec::new();
                write_series(&mut buf, &s).unwrap();
                let back = parse(std::str::from_utf8(&buf).unwrap(), ColumnSpec::First).unwrap();
                prop_assert_eq!(back, s);
            }

            #[test]
            fn tiny_values_round_trip(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 3..20)) {
                let s = TimeSeries::new(values).unwrap();
                let mut buf = Vec::new();
                write_series(&mut buf, &s).unwrap();
                let back = parse(std::str::from_utf8(&buf).unwrap(), ColumnSpec::First).unwrap();
                prop_assert_eq!(back, s);
            }
        }
    }
}
