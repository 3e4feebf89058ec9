//! CSV and JSON tables of scan results.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ap::{ClosedForm, ScanReport};
use crate::error::{Error, Result};
use crate::subst::Letter;

pub const SCHEMA_VERSION: u32 = 1;

const HEADER: [&str; 7] = ["d", "length", "start", "letter", "stable", "expected", "pass"];

/// One scanned difference. `expected` and `pass` are empty when no closed
/// form applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub d: u64,
    pub length: u64,
    pub start: u64,
    pub letter: Letter,
    pub stable: bool,
    pub expected: Option<u64>,
    pub pass: Option<bool>,
}

impl TableRow {
    pub fn from_report(report: &ScanReport) -> Self {
        TableRow {
            d: report.d,
            length: report.length,
            start: report.witness.start,
            letter: report.witness.letter,
            stable: report.stable,
            expected: None,
            pass: None,
        }
    }

    pub fn with_expectation(mut self, form: ClosedForm) -> Self {
        self.expected = Some(form.value());
        self.pass = Some(form.admits(self.length));
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for TableFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        })
    }
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown table format {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    schema_version: u32,
    rows: Vec<TableRow>,
}

pub fn write_table<W: Write>(rows: &[TableRow], format: TableFormat, out: W) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(HEADER)?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            let mut out = out;
            let table = JsonTable {
                schema_version: SCHEMA_VERSION,
                rows: rows.to_vec(),
            };
            serde_json::to_writer_pretty(&mut out, &table).map_err(|e| Error::Io(e.to_string()))?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn emit_table(rows: &[TableRow], format: TableFormat, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_table(rows, format, std::io::BufWriter::new(file))
}

pub fn read_table<R: Read>(format: TableFormat, input: R) -> Result<Vec<TableRow>> {
    match format {
        TableFormat::Csv => {
            let mut r = csv::Reader::from_reader(input);
            let header = r.headers()?.clone();
            if !header.iter().eq(HEADER) {
                return Err(Error::Io(format!("unexpected table header {header:?}")));
            }
            r.deserialize().map(|row| row.map_err(Error::from)).collect()
        }
        TableFormat::Json => {
            let table: JsonTable = serde_json::from_reader(input).map_err(|e| Error::Io(e.to_string()))?;
            if table.schema_version != SCHEMA_VERSION {
                return Err(Error::Io(format!(
                    "unsupported schema version {}",
                    table.schema_version
                )));
            }
            Ok(table.rows)
        }
    }
}

pub fn load_table(path: impl AsRef<Path>, format: TableFormat) -> Result<Vec<TableRow>> {
    read_table(format, std::io::BufReader::new(std::fs::File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<TableRow> {
        vec![
            TableRow {
                d: 3,
                length: 8,
                start: 2,
                letter: Letter::ONE,
                stable: true,
                expected: Some(8),
                pass: Some(true),
            },
            TableRow {
                d: 4,
                length: 2,
                start: 0,
                letter: Letter::ZERO,
                stable: false,
                expected: None,
                pass: None,
            },
        ]
    }

    fn render(rows: &[TableRow], format: TableFormat) -> String {
        let mut buf = Vec::new();
        write_table(rows, format, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            render(&rows(), TableFormat::Csv),
            "d,length,start,letter,stable,expected,pass\n3,8,2,1,true,8,true\n4,2,0,0,false,,\n"
        );
        assert_eq!(
            render(&[], TableFormat::Csv),
            "d,length,start,letter,stable,expected,pass\n"
        );
    }

    #[test]
    fn round_trips() {
        for format in [TableFormat::Csv, TableFormat::Json] {
            let text = render(&rows(), format);
            assert_eq!(read_table(format, text.as_bytes()).unwrap(), rows(), "{format}");
            assert!(read_table(format, render(&[], format).as_bytes()).unwrap().is_empty());
        }
        assert!(render(&rows(), TableFormat::Json).contains("\"schema_version\": 1"));
    }

    #[test]
    fn rejects_other_schema() {
        let text = r#"{"schema_version": 2, "rows": []}"#;
        assert!(read_table(TableFormat::Json, text.as_bytes()).is_err());
    }
}
