use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    /// Integers verbatim, floats with 17 significant digits.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.16e}"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(i) => (*i).into(),
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number),
        }
    }
}

/// Output file opened before any computation so an unwritable path fails fast.
pub struct Emitter {
    path: PathBuf,
    writer: BufWriter<File>,
}

impl Emitter {
    pub fn create(path: &Path) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        Ok(Emitter { path: path.to_path_buf(), writer: BufWriter::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn io(&self, e: std::io::Error) -> CliError {
        CliError::io(&self.path, e)
    }

    pub fn table(mut self, format: Format, header: &[&str], rows: &[Vec<Cell>]) -> CliResult<()> {
        match format {
            Format::Csv => {
                writeln!(self.writer, "{}", header.join(",")).map_err(|e| self.io(e))?;
                for row in rows {
                    let line: Vec<String> = row.iter().map(Cell::render).collect();
                    writeln!(self.writer, "{}", line.join(",")).map_err(|e| self.io(e))?;
                }
            }
            Format::Json => {
                let objects: Vec<serde_json::Map<String, serde_json::Value>> =
                    rows.iter().map(|row| header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect()).collect();
                serde_json::to_writer_pretty(&mut self.writer, &objects).map_err(|e| self.io(e.into()))?;
                writeln!(self.writer).map_err(|e| self.io(e))?;
            }
        }
        self.finish()
    }

    pub fn json<T: Serialize>(mut self, value: &T) -> CliResult<()> {
        serde_json::to_writer_pretty(&mut self.writer, value).map_err(|e| self.io(e.into()))?;
        writeln!(self.writer).map_err(|e| self.io(e))?;
        self.finish()
    }

    pub fn json_line<T: Serialize>(mut self, value: &T) -> CliResult<()> {
        serde_json::to_writer(&mut self.writer, value).map_err(|e| self.io(e.into()))?;
        writeln!(self.writer).map_err(|e| self.io(e))?;
        self.finish()
    }

    fn finish(mut self) -> CliResult<()> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }
}
