//! Aggregates experiment records into per-scheduler summaries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::run::ExperimentRecord;
use super::scenario::SchedulerKind;
use crate::model::TaskId;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolated quantile of sorted data (`q` in `[0, 1]`).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Distribution {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Distribution {
            count: v.len(),
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares fit of `y` on `x`. `r2` is 1 when `y` is constant.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LinearFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OverheatStats {
    pub satellite_placements: usize,
    pub exceed_rec: usize,
    pub exceed_max: usize,
    /// Mean degrees above the recommended temperature over exceeding placements.
    pub mean_over_rec_c: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizePoint {
    pub size: usize,
    pub mean_ms: f64,
    pub tasks: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulerSummary {
    pub scheduler: SchedulerKind,
    pub cells: usize,
    pub complete_cells: usize,
    pub mean_e2e_ms: Option<f64>,
    pub e2e_by_size: BTreeMap<usize, f64>,
    pub eo_latency: Option<Distribution>,
    pub slo_edges_checked: usize,
    pub slo_violations: usize,
    pub violation_rate: f64,
    pub cells_with_violations: usize,
    pub overheating: BTreeMap<TaskId, OverheatStats>,
    pub overheating_total: OverheatStats,
    pub scheduling_time: Vec<SizePoint>,
    pub scheduling_time_fit: Option<LinearFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schedulers: Vec<SchedulerSummary>,
}

impl Summary {
    pub fn get(&self, kind: SchedulerKind) -> Option<&SchedulerSummary> {
        self.schedulers.iter().find(|s| s.scheduler == kind)
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn overheat(records: &[&super::run::ThermalRecord]) -> OverheatStats {
    let over: Vec<f64> = records.iter().filter(|t| t.exceeds_rec()).map(|t| t.over_rec_c).collect();
    OverheatStats {
        satellite_placements: records.len(),
        exceed_rec: over.len(),
        exceed_max: records.iter().filter(|t| t.exceeds_max()).count(),
        mean_over_rec_c: mean(&over),
    }
}

pub fn summarize_scheduler(kind: SchedulerKind, records: &[&ExperimentRecord]) -> SchedulerSummary {
    let e2e: Vec<f64> = records.iter().filter_map(|r| r.e2e_latency_ms).collect();
    let mut by_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut times: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(l) = r.e2e_latency_ms {
            by_size.entry(r.size).or_default().push(l);
        }
        times
            .entry(r.size)
            .or_default()
            .extend(r.decisions.iter().map(|d| d.wall_time_ms));
    }
    let eo: Vec<f64> = records.iter().filter_map(|r| r.eo_latency_ms).collect();
    let checked = records
        .iter()
        .flat_map(|r| &r.edges)
        .filter(|e| e.slo.is_some() && e.placed)
        .count();
    let violations: usize = records.iter().map(|r| r.slo_violations()).sum();

    let thermal: Vec<_> = records.iter().flat_map(|r| &r.thermal).collect();
    let mut per_task: BTreeMap<TaskId, Vec<&super::run::ThermalRecord>> = BTreeMap::new();
    for t in &thermal {
        per_task.entry(t.task.clone()).or_default().push(t);
    }
    let scheduling_time: Vec<SizePoint> = times
        .into_iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(size, v)| SizePoint {
            size,
            mean_ms: mean(&v).unwrap_or(0.0),
            tasks: v.len(),
        })
        .collect();
    let fit_points: Vec<(f64, f64)> = scheduling_time.iter().map(|p| (p.size as f64, p.mean_ms)).collect();

    SchedulerSummary {
        scheduler: kind,
        cells: records.len(),
        complete_cells: records.iter().filter(|r| r.complete).count(),
        mean_e2e_ms: mean(&e2e),
        e2e_by_size: by_size.into_iter().filter_map(|(s, v)| Some((s, mean(&v)?))).collect(),
        eo_latency: Distribution::of(&eo),
        slo_edges_checked: checked,
        slo_violations: violations,
        violation_rate: if checked == 0 { 0.0 } else { violations as f64 / checked as f64 },
        cells_with_violations: records.iter().filter(|r| r.slo_violations() > 0).count(),
        overheating: per_task.iter().map(|(t, v)| (t.clone(), overheat(v))).collect(),
        overheating_total: overheat(&thermal),
        scheduling_time,
        scheduling_time_fit: linear_fit(&fit_points),
    }
}

/// Per-scheduler summary in first-seen scheduler order.
pub fn summarize(records: &[ExperimentRecord]) -> Summary {
    let mut kinds: Vec<SchedulerKind> = Vec::new();
    for r in records {
        if !kinds.contains(&r.scheduler) {
            kinds.push(r.scheduler);
        }
    }
    Summary {
        schedulers: kinds
            .into_iter()
            .map(|k| {
                let mine: Vec<&ExperimentRecord> = records.iter().filter(|r| r.scheduler == k).collect();
                summarize_scheduler(k, &mine)
            })
            .collect(),
    }
}
