//! Experiment report assembly and emission.
//!
//! `report.json` is fully deterministic for a given config: wall-clock
//! times are excluded from it and live in the `timing.json` sidecar
//! instead. The Markdown and CSV renderings include the Time column.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::PipelineConfig;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// One table row per method arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    /// Training wall time. Not serialized into `report.json` (kept
    /// deterministic); rendered in Markdown/CSV and `timing.json`.
    #[serde(skip)]
    pub time_seconds: f64,
    pub size_retained_percent: f64,
    pub mse: f64,
    pub r2: f64,
    pub mae: f64,
    pub improvement_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    /// First row is always the baseline (size 100, improvement 0).
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Markdown,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::config(format!("unknown report format '{other}'"))),
        }
    }
}

/// Render a report. JSON round-trips losslessly through
/// `ExperimentReport`; Markdown mirrors the method/time/size/MSE table
/// layout; CSV holds the same cells machine-readably.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        ReportFormat::Markdown => Ok(render_markdown(report)),
        ReportFormat::Csv => Ok(render_csv(report)),
    }
}

pub fn parse_report(json: &str) -> Result<ExperimentReport> {
    let report: ExperimentReport = serde_json::from_str(json)?;
    if report.schema_version != REPORT_SCHEMA_VERSION {
        return Err(Error::data(format!(
            "unsupported report schema version {}",
            report.schema_version
        )));
    }
    Ok(report)
}

fn render_markdown(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str("# Pruning impact report\n\n");
    out.push_str(&format!(
        "seed {} · tool v{}\n\n",
        report.seed, report.tool_version
    ));
    out.push_str("| Method | Time (s) | Size (%) | MSE | R² | MAE | Improv. (%) |\n");
    out.push_str("|---|---|---|---|---|---|---|\n");
    for row in &report.rows {
        out.push_str(&format!(
            "| {} | {:.2} | {:.1} | {:.6} | {:.4} | {:.6} | {:.2} |\n",
            row.method,
            row.time_seconds,
            row.size_retained_percent,
            row.mse,
            row.r2,
            row.mae,
            row.improvement_percent
        ));
    }
    out
}

fn render_csv(report: &ExperimentReport) -> String {
    let mut out =
        String::from("method,time_seconds,size_retained_percent,mse,r2,mae,improvement_percent\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.method,
            row.time_seconds,
            row.size_retained_percent,
            row.mse,
            row.r2,
            row.mae,
            row.improvement_percent
        ));
    }
    out
}

/// Wall-clock sidecar next to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub rows: Vec<TimingRow>,
    pub explain_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub method: String,
    pub train_seconds: f64,
}
