use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

/// Output format selected with `--format`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
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

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidInput(format!("unknown format '{s}' (expected csv or json)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// CSV rendering: floats with 17 significant digits, non-finite as `nan`/`inf`.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) => Value::Null,
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// Header metadata written next to every data file.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Metadata {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma0_over_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_over_lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub quantities: Vec<String>,
    pub code_version: String,
    pub step_policy: String,
}

impl Metadata {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            step_policy: step_policy(),
            ..Self::default()
        }
    }
}

pub fn step_policy() -> String {
    use crate::path::*;
    format!(
        "step {DEFAULT_FINE_STEP:e} for lambda_t <= {GRID_SWITCH_TIME}, {DEFAULT_COARSE_STEP:e} beyond, \
         capped at {RESOLUTION_CAP}*2pi/|Im Omega|; arc-length routes agree to {ARC_LENGTH_AGREEMENT:e} \
         with at most one refinement"
    )
}

/// A rectangular table with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io_err = |e: csv::Error| Error::Io(format!("cannot write CSV: {e}"));
        w.write_record(&self.columns).map_err(io_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(io_err)?;
        }
        w.flush().map_err(|e| Error::Io(format!("cannot write CSV: {e}")))
    }

    pub fn to_json(&self, meta: &Metadata) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::to_json)).collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "metadata": meta, "columns": self.columns, "rows": rows })
    }

    /// Writes to `out`, or to stdout when `out` is `None`. CSV files get a
    /// `.meta.json` sidecar; JSON embeds the metadata.
    pub fn emit(&self, meta: &Metadata, format: Format, out: Option<&Path>) -> Result<Vec<PathBuf>> {
        match (format, out) {
            (Format::Csv, None) => {
                self.write_csv(io::stdout().lock())?;
                Ok(Vec::new())
            }
            (Format::Json, None) => {
                let mut stdout = io::stdout().lock();
                write_json(&mut stdout, &self.to_json(meta))?;
                Ok(Vec::new())
            }
            (Format::Csv, Some(path)) => {
                let file = create(path)?;
                self.write_csv(io::BufWriter::new(file))?;
                let sidecar = sidecar_path(path);
                write_json(&mut create(&sidecar)?, &serde_json::to_value(meta).expect("metadata serializes"))?;
                Ok(vec![path.to_path_buf(), sidecar])
            }
            (Format::Json, Some(path)) => {
                write_json(&mut create(path)?, &self.to_json(meta))?;
                Ok(vec![path.to_path_buf()])
            }
        }
    }
}

/// `dir/name.csv` -> `dir/name.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))
}

fn write_json<W: Write>(out: &mut W, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    writeln!(out, "{text}").map_err(|e| Error::Io(format!("cannot write JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::NAN), "nan");
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 12345.678, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_uses_lf_and_header() {
        let mut t = Table::new(&["a", "flag"]);
        t.push(vec![1.5.into(), "ok".into()]);
        t.push(vec![f64::NAN.into(), "grid_resolution".into()]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "a,flag\n1.5000000000000000e0,ok\nnan,grid_resolution\n");
    }

    #[test]
    fn json_mirrors_columns() {
        let mut t = Table::new(&["x", "valid"]);
        t.push(vec![2.0.into(), true.into()]);
        t.push(vec![f64::NAN.into(), false.into()]);
        let v = t.to_json(&Metadata::new("evolve"));
        assert_eq!(v["rows"][0]["x"], json!(2.0));
        assert_eq!(v["rows"][1]["x"], Value::Null);
        assert_eq!(v["rows"][1]["valid"], json!(false));
        assert_eq!(v["metadata"]["command"], json!("evolve"));
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/fig1_blp_N.csv")), Path::new("out/fig1_blp_N.meta.json"));
    }
}
