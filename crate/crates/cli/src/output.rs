use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// Top-level JSON document for every command.
#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: &'static str,
    pub format_version: u32,
    pub parameters: Value,
    pub data: Value,
}

#[derive(Debug, Default)]
pub struct CsvTable {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        let row: Vec<String> = row.into_iter().collect();
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// A command's result, renderable as either JSON or CSV.
pub struct Rendered {
    pub envelope: Envelope,
    pub table: CsvTable,
}

impl Rendered {
    pub fn write<W: Write>(self, csv: bool, out: &mut W) -> Result<(), CliError> {
        if csv {
            let mut writer = csv::Writer::from_writer(out);
            writer.write_record(&self.table.headers)?;
            for row in &self.table.rows {
                writer.write_record(row)?;
            }
            writer.flush()?;
        } else {
            serde_json::to_writer_pretty(&mut *out, &self.envelope)?;
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Float formatting for CSV cells.
pub fn float(v: f64) -> String {
    format!("{v}")
}
