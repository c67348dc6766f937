//! CSV and JSON writers targeting a file or standard output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use williamson::{Error, Result};

/// Opens `path`, or standard output when absent.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

/// A table with a mandatory header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Lines written before the header, each prefixed by `# `.
    pub comments: Vec<String>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new(), comments: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.comments {
            writeln!(w, "# {c}").map_err(io_error)?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.header).map_err(io_error)?;
        for row in &self.rows {
            csv.write_record(row).map_err(io_error)?;
        }
        csv.flush().map_err(io_error)
    }

    pub fn write(&self, path: Option<&Path>) -> Result<()> {
        self.write_to(sink(path)?)
    }
}

/// Shortest round-trip form of a float.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

/// Pretty JSON with object keys sorted.
pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    // Round-tripping through `Value` sorts keys since its map is ordered.
    let v = serde_json::to_value(value).map_err(io_error)?;
    serde_json::to_string_pretty(&v).map_err(io_error)
}

pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = sink(path)?;
    writeln!(w, "{}", json_string(value)?).map_err(io_error)?;
    w.flush().map_err(io_error)
}
