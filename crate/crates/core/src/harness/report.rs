//! CSV and Markdown renderings of evaluation results.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::eval::{EvalReport, SweepReport};
use super::metrics::Metrics;
use crate::error::{AadError, Result};

pub const CSV_HEADER: [&str; 8] = [
    "alpha",
    "prefix",
    "acc",
    "precision",
    "recall",
    "f1",
    "yes_rate",
    "unparseable_rate",
];

/// Accuracy and F1 of uniform guessing on a balanced yes/no set.
pub const RANDOM_GUESS_ACCURACY: f64 = 0.5;
pub const RANDOM_GUESS_F1: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct ReportRow<'a> {
    pub alpha: f64,
    pub prefix: &'a str,
    /// `Err` carries the failure message of a row that did not complete.
    pub outcome: std::result::Result<&'a Metrics, String>,
}

impl EvalReport {
    pub fn report_row(&self) -> ReportRow<'_> {
        ReportRow {
            alpha: self.config.alpha,
            prefix: &self.config.prefix,
            outcome: Ok(&self.metrics),
        }
    }
}

impl SweepReport {
    pub fn report_rows(&self) -> Vec<ReportRow<'_>> {
        self.rows
            .iter()
            .map(|r| ReportRow {
                alpha: r.alpha,
                prefix: &r.prefix,
                outcome: r
                    .outcome
                    .as_ref()
                    .map(|e| &e.metrics)
                    .map_err(|e| e.to_string()),
            })
            .collect()
    }
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

/// Writes one CSV line per row. Failed rows keep alpha and prefix and leave
/// the metric columns empty.
pub fn write_csv<W: Write>(rows: &[ReportRow<'_>], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| AadError::Run(format!("writing CSV: {e}"));
    writer.write_record(CSV_HEADER).map_err(to_err)?;
    for row in rows {
        let mut record = vec![row.alpha.to_string(), row.prefix.to_owned()];
        match &row.outcome {
            Ok(m) => record.extend(
                [
                    m.accuracy,
                    m.precision,
                    m.recall,
                    m.f1,
                    m.yes_rate,
                    m.unparseable_rate,
                ]
                .map(fixed),
            ),
            Err(_) => record.extend(std::iter::repeat_n(String::new(), 6)),
        }
        writer.write_record(&record).map_err(to_err)?;
    }
    writer
        .flush()
        .map_err(|e| AadError::Run(format!("writing CSV: {e}")))
}

pub fn write_csv_file(rows: &[ReportRow<'_>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| AadError::io(path, e))?;
    write_csv(rows, std::io::BufWriter::new(file))
}

/// A Markdown table with accuracy, precision, recall, F1 and the yes and
/// unparseable percentages, followed by the random-guess reference.
pub fn markdown_table(title: &str, rows: &[ReportRow<'_>]) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "### {title}\n");
    md.push_str("| α | Prefix | Acc | Precision | Recall | F1 | Yes (%) | Unparseable (%) |\n");
    md.push_str("|---:|:---|---:|---:|---:|---:|---:|---:|\n");
    let mut failures = Vec::new();
    for row in rows {
        let prefix = if row.prefix.is_empty() {
            "(none)".to_owned()
        } else {
            row.prefix.replace('|', "\\|")
        };
        match &row.outcome {
            Ok(m) => {
                let _ = writeln!(
                    md,
                    "| {} | {} | {:.3} | {:.3} | {:.3} | {:.3} | {:.1} | {:.1} |",
                    row.alpha,
                    prefix,
                    m.accuracy,
                    m.precision,
                    m.recall,
                    m.f1,
                    100.0 * m.yes_rate,
                    100.0 * m.unparseable_rate
                );
            }
            Err(e) => {
                let _ = writeln!(md, "| {} | {} | - | - | - | - | - | - |", row.alpha, prefix);
                failures.push(format!("α = {}, prefix {:?}: {e}", row.alpha, row.prefix));
            }
        }
    }
    let _ = writeln!(
        md,
        "\nRandom-guess reference (balanced set): Acc {RANDOM_GUESS_ACCURACY:.3}, F1 {RANDOM_GUESS_F1:.3}"
    );
    for f in failures {
        let _ = writeln!(md, "\nFailed: {f}");
    }
    md
}
