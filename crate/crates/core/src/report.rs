//! Per-trial report rows and their JSON/CSV emission.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::Result;

/// One trial of a suite: both sides of the checked comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

impl ReportRow {
    pub fn new(trial: usize, lhs: f64, rhs: f64, holds: bool) -> Self {
        Self { trial, lhs, rhs, slack: rhs - lhs, holds }
    }
}

pub const CSV_HEADER: [&str; 5] = ["trial", "lhs", "rhs", "slack", "holds"];

/// Writes rows in the given format; CSV output always carries the header.
pub fn write_report<W: Write>(rows: &[ReportRow], format: Format, mut writer: W) -> Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut writer, rows)?;
            writeln!(writer)?;
        }
        Format::Csv => {
            let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
            csv.write_record(CSV_HEADER)?;
            for row in rows {
                csv.serialize(row)?;
            }
            csv.flush()?;
        }
    }
    Ok(())
}

/// Writes rows to `path`.
pub fn emit_report(rows: &[ReportRow], format: Format, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_report(rows, format, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Parses a JSON report.
pub fn read_json_report(text: &str) -> Result<Vec<ReportRow>> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(rows: &[ReportRow], format: Format) -> String {
        let mut buf = Vec::new();
        write_report(rows, format, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(render(&[], Format::Csv), "trial,lhs,rhs,slack,holds\n");
    }

    #[test]
    fn one_row() {
        let rows = [ReportRow::new(0, 4.0, 5.0, true)];
        assert_eq!(render(&rows, Format::Csv), "trial,lhs,rhs,slack,holds\n0,4.0,5.0,1.0,true\n");
        let json = render(&rows, Format::Json);
        assert_eq!(read_json_report(&json).unwrap(), rows);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value[0]["slack"], 1.0);
    }

    #[test]
    fn json_round_trip_is_identity() {
        let rows = vec![ReportRow::new(0, 0.1, 0.30000000000000004, true), ReportRow::new(1, 2.0, -1.0, false)];
        let text = render(&rows, Format::Json);
        assert_eq!(render(&read_json_report(&text).unwrap(), Format::Json), text);
    }

    #[test]
    fn unwritable_path_is_an_error() {
        assert!(emit_report(&[], Format::Json, Path::new("/nonexistent-dir/x/report.json")).is_err());
    }
}
