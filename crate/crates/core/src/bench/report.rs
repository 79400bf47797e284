use std::path::Path;

use super::config::ReportFormat;
use super::experiment::Row;
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Renders rows as RFC 4180 CSV with a header, or as `key=value` text blocks.
pub fn format_report(rows: &[Row], format: ReportFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Parameter("report needs at least one row".into()));
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?;
    match format {
        ReportFormat::Csv => Ok(text),
        ReportFormat::Text => {
            let mut rd = csv::Reader::from_reader(text.as_bytes());
            let header = rd.headers().map_err(csv_err)?.clone();
            let mut out = String::new();
            for rec in rd.records() {
                let rec = rec.map_err(csv_err)?;
                out.push_str("[row]\n");
                for (k, v) in header.iter().zip(rec.iter()) {
                    out.push_str(&format!("{k} = {v:?}\n"));
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

pub fn parse_csv_report(text: &str) -> Result<Vec<Row>> {
    csv::Reader::from_reader(text.as_bytes()).deserialize().map(|r| r.map_err(csv_err)).collect()
}

/// Writes the report to `path`, or returns it when `path` is `None`.
pub fn emit_report(rows: &[Row], format: ReportFormat, path: Option<&Path>) -> Result<Option<String>> {
    let text = format_report(rows, format)?;
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(i: usize) -> Row {
        Row {
            index: i,
            method: "one".into(),
            pipeline: "reduction-one".into(),
            builder: "identity".into(),
            seed: 4,
            dataset_seed: 1,
            n: 30,
            k: 2,
            m: 1,
            z: 2,
            eps: 0.2,
            coreset_size: 12,
            additive_used: 3,
            max_rel_error: Some(0.013),
            pass: Some(true),
            wall_time_ms: 1.5,
            failure: if i == 1 { "pipeline failure: x, \"quoted\"".into() } else { String::new() },
        }
    }

    #[test]
    fn one_row_is_header_plus_line() {
        let text = format_report(&[row(0)], ReportFormat::Csv).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("index,method,pipeline,builder,seed,"));
    }

    #[test]
    fn csv_round_trips_with_quoting() {
        let rows = vec![row(0), row(1), Row { max_rel_error: None, pass: None, ..row(2) }];
        let text = format_report(&rows, ReportFormat::Csv).unwrap();
        assert!(text.contains("\"pipeline failure: x, \"\"quoted\"\"\""));
        assert_eq!(parse_csv_report(&text).unwrap(), rows);
        assert_eq!(text, format_report(&rows, ReportFormat::Csv).unwrap());
    }

    #[test]
    fn text_format_and_errors() {
        let text = format_report(&[row(0)], ReportFormat::Text).unwrap();
        assert!(text.contains("coreset_size = \"12\""));
        assert!(format_report(&[], ReportFormat::Csv).is_err());
        assert!(matches!(emit_report(&[row(0)], ReportFormat::Csv, Some(Path::new("/nonexistent/dir/r.csv"))), Err(Error::Io(_))));
    }
}
