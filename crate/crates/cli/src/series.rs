//! Curve series and their CSV and JSON encodings.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::format::fmt_g12;
use crate::{CliError, CliResult};

/// One curve: ordered `(x, y)` points with axis names and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSeries {
    pub label: String,
    pub x_name: String,
    pub y_name: String,
    pub points: Vec<(f64, f64)>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl CurveSeries {
    pub fn new(label: impl Into<String>, x_name: impl Into<String>, y_name: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            x_name: x_name.into(),
            y_name: y_name.into(),
            points: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_points(mut self, points: Vec<(f64, f64)>) -> Self {
        self.points = points;
        self
    }

    pub fn meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn meta_num(self, key: &str, value: f64) -> Self {
        self.meta(key, fmt_g12(value))
    }

    /// Checks that every value is finite and `x` strictly increases.
    pub fn validate(&self) -> CliResult<()> {
        if let Some((x, y)) = self.points.iter().find(|(x, y)| !(x.is_finite() && y.is_finite())) {
            return Err(CliError::Numeric(format!("series `{}` has a non-finite point ({x}, {y})", self.label)));
        }
        if let Some(w) = self.points.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(CliError::Usage(format!(
                "series `{}`: x must strictly increase, got {} then {}",
                self.label, w[0].0, w[1].0
            )));
        }
        Ok(())
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.0)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }
}

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Validates and writes `series` in `format`.
pub fn write_series<W: Write>(out: W, series: &[CurveSeries], format: Format) -> CliResult<()> {
    for s in series {
        s.validate()?;
    }
    match format {
        Format::Csv => write_csv(out, series),
        Format::Json => write_json(out, series),
    }
}

/// CSV with `# label key: value` metadata lines above the header. A single
/// series gets the header `x_name,y_name`; several get a leading `series`
/// column.
pub fn write_csv<W: Write>(mut out: W, series: &[CurveSeries]) -> CliResult<()> {
    for s in series {
        for (k, v) in &s.metadata {
            writeln!(out, "# {} {k}: {v}", s.label)?;
        }
    }
    let single = series.len() == 1;
    let shared = |f: fn(&CurveSeries) -> &str, fallback: &str| -> String {
        match series.first() {
            Some(first) if series.iter().all(|s| f(s) == f(first)) => f(first).to_string(),
            _ => fallback.to_string(),
        }
    };
    let x_name = shared(|s| &s.x_name, "x");
    let y_name = shared(|s| &s.y_name, "y");
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let csv_err = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    if single {
        writer.write_record([&x_name, &y_name]).map_err(csv_err)?;
    } else {
        writer.write_record(["series", &x_name, &y_name]).map_err(csv_err)?;
    }
    for s in series {
        for &(x, y) in &s.points {
            let (x, y) = (fmt_g12(x), fmt_g12(y));
            if single {
                writer.write_record([&x, &y]).map_err(csv_err)?;
            } else {
                writer.write_record([s.label.as_str(), &x, &y]).map_err(csv_err)?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

/// A JSON array of series. Numbers are written in shortest round-trip form.
pub fn write_json<W: Write>(mut out: W, series: &[CurveSeries]) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut out, series).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

/// Reads series written by [`write_json`] and validates them.
pub fn read_json<R: Read>(input: R) -> CliResult<Vec<CurveSeries>> {
    let series: Vec<CurveSeries> =
        serde_json::from_reader(input).map_err(|e| CliError::Usage(format!("invalid series JSON: {e}")))?;
    for s in &series {
        s.validate()?;
    }
    Ok(series)
}
