use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ablation::EvalReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "md" | "markdown" => Ok(Self::Markdown),
            other => Err(Error::InvalidParameter(format!("unknown report format {other}"))),
        }
    }
}

/// One CSV row: `composition,group,n_images,mean_iou,failures`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub composition: String,
    pub group: String,
    pub n_images: usize,
    /// Three decimals; `NA` when no item succeeded.
    pub mean_iou: String,
    pub failures: usize,
}

impl ReportRow {
    pub fn mean(&self) -> Option<f64> {
        self.mean_iou.parse().ok()
    }
}

fn rows(reports: &[EvalReport]) -> impl Iterator<Item = ReportRow> + '_ {
    reports.iter().map(|r| ReportRow {
        composition: r.composition_label(),
        group: r.group.clone(),
        n_images: r.n_images(),
        mean_iou: r.mean_iou.map_or_else(|| "NA".to_string(), |m| format!("{m:.3}")),
        failures: r.failures.len(),
    })
}

/// Rows follow the order of `reports`.
pub fn render_report(reports: &[EvalReport], format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            if reports.is_empty() {
                w.write_record(["composition", "group", "n_images", "mean_iou", "failures"])?;
            }
            for row in rows(reports) {
                w.serialize(row)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
        }
        ReportFormat::Markdown => {
            let mut out = String::from(
                "| Composition | Group | Images | Mean IoU | Failures |\n|---|---|---:|---:|---:|\n",
            );
            for row in rows(reports) {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    row.composition, row.group, row.n_images, row.mean_iou, row.failures
                );
            }
            Ok(out)
        }
    }
}

pub fn parse_csv_report(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    Ok(reader.deserialize().collect::<std::result::Result<_, _>>()?)
}
