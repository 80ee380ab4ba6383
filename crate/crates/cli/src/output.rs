//! Result tables and their CSV and JSON renderings.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::config::{ExperimentConfig, Format};
use crate::CliError;

pub const OUTPUT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u128),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => match u64::try_from(*v) {
                Ok(small) => s.serialize_u64(small),
                Err(_) => s.serialize_u128(*v),
            },
            Cell::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Float(_) | Cell::Empty => s.serialize_none(),
            Cell::Text(v) => s.serialize_str(v),
            Cell::Bool(v) => s.serialize_bool(*v),
        }
    }
}

/// Rows of one subcommand under a fixed column list.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &'static [&'static str]) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Serializes rows as objects keyed by column, in column order.
struct Rows<'a>(&'a Table);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
        for row in &self.0.rows {
            seq.serialize_element(&Row(self.0.columns, row))?;
        }
        seq.end()
    }
}

struct Row<'a>(&'a [&'static str], &'a [Cell]);

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (name, cell) in self.0.iter().zip(self.1) {
            map.serialize_entry(name, cell)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    seed: u64,
    config_hash: String,
    config: &'a ExperimentConfig,
}

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    meta: Meta<'a>,
    columns: &'static [&'static str],
    rows: Rows<'a>,
}

/// The first line of every CSV output.
pub fn meta_line(config: &ExperimentConfig) -> String {
    format!(
        "# latticeperm {} seed={} config={}",
        env!("CARGO_PKG_VERSION"),
        config.seed,
        config.hash()
    )
}

pub fn render(table: &Table, config: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    match config.format {
        Format::Csv => {
            let mut out = meta_line(config).into_bytes();
            out.push(b'\n');
            let mut w = csv::Writer::from_writer(out);
            w.write_record(table.columns).map_err(csv_error)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::to_csv)).map_err(csv_error)?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.into_error()))
        }
        Format::Json => {
            let doc = Document {
                schema_version: OUTPUT_SCHEMA_VERSION,
                meta: Meta {
                    tool: "latticeperm",
                    version: env!("CARGO_PKG_VERSION"),
                    subcommand: config.subcommand.name(),
                    seed: config.seed,
                    config_hash: config.hash(),
                    config,
                },
                columns: table.columns,
                rows: Rows(table),
            };
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Usage(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}
