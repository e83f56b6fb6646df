//! Result rendering: typed cells, mandatory-header CSV or JSON with the
//! merged configuration embedded, and the config echo written next to
//! every output file.

use std::path::{Path, PathBuf};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

/// One table cell.
///
/// Numbers are rendered as the shortest decimal that parses back to the
/// exact same double, so full precision always survives the file format.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::json!(v),
            Cell::Num(v) => serde_json::json!(v),
            Cell::Bool(v) => serde_json::json!(v),
            Cell::Text(v) => serde_json::json!(v),
        }
    }
}

/// A rectangular result with named columns.
#[derive(Debug)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV with the header as the first record.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)
            .and_then(|()| {
                self.rows
                    .iter()
                    .try_for_each(|row| w.write_record(row.iter().map(Cell::render)))
            })
            .map_err(|e| CliError::Io(format!("encoding csv: {e}")))?;
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Io(format!("encoding csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(format!("encoding csv: {e}")))
    }

    /// One JSON object: the merged config plus rows as column-keyed maps.
    pub fn to_json(&self, config: &RunConfig) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| ((*c).to_string(), cell.json()))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            })
            .collect();
        let body = serde_json::json!({ "config": config, "rows": rows });
        format!("{body:#}\n")
    }

    fn render(&self, config: &RunConfig) -> Result<String, CliError> {
        match config.format() {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => Ok(self.to_json(config)),
        }
    }
}

/// Writes the table to `config.out` (or stdout), echoing the merged
/// config next to file output.
pub fn deliver(table: &Table, config: &RunConfig) -> Result<(), CliError> {
    let body = table.render(config)?;
    match &config.out {
        Some(path) => {
            write_file(path, &body)?;
            echo_config(path, config)
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// `<out>.config.json`: the merged configuration that reproduces the run.
pub fn echo_config(out: &Path, config: &RunConfig) -> Result<(), CliError> {
    let path = PathBuf::from(format!("{}.config.json", out.display()));
    let body = serde_json::to_string_pretty(config)
        .expect("run configuration serializes infallibly");
    write_file(&path, &format!("{body}\n"))
}

pub fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body)
        .map_err(|e| CliError::io(&format!("writing {}", path.display()), e))
}
