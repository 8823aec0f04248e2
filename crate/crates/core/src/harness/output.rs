//! Result files: `records.jsonl`, `decisions.csv` and `summary.json`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::metrics::Summary;
use super::run::ExperimentRecord;
use crate::error::ConfigError;
use crate::model::Outcome;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const DECISIONS_FILE: &str = "decisions.csv";
pub const SUMMARY_FILE: &str = "summary.json";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ConfigError + '_ {
    move |source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, message: impl ToString) -> ConfigError {
    ConfigError::Parse {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

#[derive(Serialize)]
struct DecisionRow<'a> {
    scheduler: &'a str,
    size: usize,
    seed: u64,
    task: &'a str,
    node: Option<u32>,
    node_kind: Option<String>,
    outcome: &'a str,
    reason: &'a str,
    candidates: usize,
    eligible: usize,
    commit_attempts: u32,
    restarts: u32,
    wall_time_ms: f64,
    worst_incoming_latency_ms: Option<f64>,
    predicted_temp_c: Option<f64>,
}

pub fn write_records(dir: &Path, records: &[ExperimentRecord]) -> Result<(), ConfigError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(RECORDS_FILE);
    let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| parse_err(&path, e))?;
        writeln!(out, "{line}").map_err(io_err(&path))?;
    }
    out.flush().map_err(io_err(&path))?;

    let path = dir.join(DECISIONS_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(|e| parse_err(&path, e))?;
    for r in records {
        for d in &r.decisions {
            let (outcome, reason) = match &d.outcome {
                Outcome::Committed => ("committed", ""),
                Outcome::Failed { reason } => ("failed", reason.as_str()),
            };
            let score = d.chosen.and_then(|n| d.scores.iter().find(|s| s.node == n));
            let row = DecisionRow {
                scheduler: r.scheduler.name(),
                size: r.size,
                seed: r.seed,
                task: d.task.as_str(),
                node: d.chosen.map(|n| n.0),
                node_kind: r.placement_kinds.get(&d.task).map(|k| k.to_string()),
                outcome,
                reason,
                candidates: d.candidate_count,
                eligible: d.eligible_count,
                commit_attempts: d.commit_attempts,
                restarts: d.restarts,
                wall_time_ms: d.wall_time_ms,
                worst_incoming_latency_ms: score.map(|s| s.worst_latency_ms),
                predicted_temp_c: r.thermal.iter().find(|t| t.task == d.task).map(|t| t.predicted_c),
            };
            w.serialize(row).map_err(|e| parse_err(&path, e))?;
        }
    }
    w.flush().map_err(io_err(&path))?;
    Ok(())
}

pub fn read_records(dir: &Path) -> Result<Vec<ExperimentRecord>, ConfigError> {
    let path = dir.join(RECORDS_FILE);
    let file = File::open(&path).map_err(io_err(&path))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(&path))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| parse_err(&path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(records)
}

pub fn write_summary_json(dir: &Path, summary: &Summary) -> Result<(), ConfigError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(SUMMARY_FILE);
    let text = serde_json::to_string_pretty(summary).map_err(|e| parse_err(&path, e))?;
    fs::write(&path, text + "\n").map_err(io_err(&path))
}

#[derive(Serialize)]
struct SummaryRow {
    scheduler: &'static str,
    cells: usize,
    complete_cells: usize,
    mean_e2e_ms: Option<f64>,
    eo_min_ms: Option<f64>,
    eo_q1_ms: Option<f64>,
    eo_median_ms: Option<f64>,
    eo_q3_ms: Option<f64>,
    eo_max_ms: Option<f64>,
    slo_edges_checked: usize,
    slo_violations: usize,
    violation_rate: f64,
    satellite_placements: usize,
    exceed_rec: usize,
    exceed_max: usize,
    mean_over_rec_c: Option<f64>,
    time_slope_ms_per_node: Option<f64>,
    time_r2: Option<f64>,
}

/// One CSV row per scheduler.
pub fn summary_csv(summary: &Summary, out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for s in &summary.schedulers {
        let eo = s.eo_latency.as_ref();
        w.serialize(SummaryRow {
            scheduler: s.scheduler.name(),
            cells: s.cells,
            complete_cells: s.complete_cells,
            mean_e2e_ms: s.mean_e2e_ms,
            eo_min_ms: eo.map(|d| d.min),
            eo_q1_ms: eo.map(|d| d.q1),
            eo_median_ms: eo.map(|d| d.median),
            eo_q3_ms: eo.map(|d| d.q3),
            eo_max_ms: eo.map(|d| d.max),
            slo_edges_checked: s.slo_edges_checked,
            slo_violations: s.slo_violations,
            violation_rate: s.violation_rate,
            satellite_placements: s.overheating_total.satellite_placements,
            exceed_rec: s.overheating_total.exceed_rec,
            exceed_max: s.overheating_total.exceed_max,
            mean_over_rec_c: s.overheating_total.mean_over_rec_c,
            time_slope_ms_per_node: s.scheduling_time_fit.map(|f| f.slope),
            time_r2: s.scheduling_time_fit.map(|f| f.r2),
        })?;
    }
    w.flush()?;
    Ok(())
}
