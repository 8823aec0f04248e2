//! Pass/fail checks over a finished experiment matrix.

use std::fmt;

use super::metrics::{Summary, SchedulerSummary};
use super::run::ExperimentRecord;
use super::scenario::SchedulerKind;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

fn result(id: u8, name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { id, name, passed, detail }
}

const BASELINES: [SchedulerKind; 3] = [SchedulerKind::FirstFit, SchedulerKind::RoundRobin, SchedulerKind::Random];

fn require<'a>(summary: &'a Summary, kind: SchedulerKind) -> Result<&'a SchedulerSummary, String> {
    summary.get(kind).ok_or_else(|| format!("{kind} was not run"))
}

/// HyperDrive has the strictly lowest mean E2E latency, at least
/// `min_gap` (fraction) below the runner-up.
pub fn e2e_ordering(summary: &Summary, min_gap: f64) -> CheckResult {
    let name = "E2E latency ordering";
    let mut means: Vec<(SchedulerKind, f64)> = summary
        .schedulers
        .iter()
        .map(|s| (s.scheduler, s.mean_e2e_ms.unwrap_or(f64::INFINITY)))
        .collect();
    means.sort_by(|a, b| a.1.total_cmp(&b.1));
    let listing = means
        .iter()
        .map(|(k, m)| format!("{k}={m:.2}ms"))
        .collect::<Vec<_>>()
        .join(", ");
    let Some(hd) = means.iter().find(|(k, _)| *k == SchedulerKind::Hyperdrive).map(|m| m.1) else {
        return result(1, name, false, "hyperdrive was not run".into());
    };
    let runner_up = means
        .iter()
        .filter(|(k, _)| *k != SchedulerKind::Hyperdrive)
        .map(|m| m.1)
        .fold(f64::INFINITY, f64::min);
    let gap = 1.0 - hd / runner_up;
    let passed = hd.is_finite() && hd < runner_up && gap >= min_gap;
    result(1, name, passed, format!("{listing}; gap to runner-up {:.1}%", gap * 100.0))
}

/// HyperDrive never violates an incoming-link SLO; every baseline does in some cell.
pub fn slo_compliance(summary: &Summary) -> CheckResult {
    let name = "SLO compliance";
    let hd = match require(summary, SchedulerKind::Hyperdrive) {
        Ok(s) => s,
        Err(e) => return result(2, name, false, e),
    };
    let mut passed = hd.slo_violations == 0;
    let mut parts = vec![format!("hyperdrive {}/{}", hd.slo_violations, hd.slo_edges_checked)];
    for b in BASELINES {
        match summary.get(b) {
            Some(s) => {
                passed &= s.cells_with_violations > 0;
                parts.push(format!("{b} {}/{} in {} cells", s.slo_violations, s.slo_edges_checked, s.cells_with_violations));
            }
            None => {
                passed = false;
                parts.push(format!("{b} not run"));
            }
        }
    }
    result(2, name, passed, parts.join(", "))
}

/// Every HyperDrive placement fed by a data source meets that edge's SLO,
/// and Random's median data-source latency is higher.
pub fn eo_slo(records: &[ExperimentRecord], summary: &Summary) -> CheckResult {
    let name = "EO data SLO";
    let hd_edges: Vec<_> = records
        .iter()
        .filter(|r| r.scheduler == SchedulerKind::Hyperdrive)
        .flat_map(|r| r.edges.iter().filter(|e| e.from_data_source))
        .collect();
    let placed = hd_edges.iter().filter(|e| e.placed).count();
    let ok = hd_edges
        .iter()
        .filter(|e| e.placed && e.violation.is_none() && e.latency_ms.is_some())
        .count();
    let med = |k| summary.get(k).and_then(|s| s.eo_latency.as_ref()).map(|d| d.median);
    let (hd_med, rnd_med) = (med(SchedulerKind::Hyperdrive), med(SchedulerKind::Random));
    let passed = placed > 0
        && ok == placed
        && placed == hd_edges.len()
        && matches!((hd_med, rnd_med), (Some(h), Some(r)) if r > h);
    result(
        3,
        name,
        passed,
        format!(
            "hyperdrive {ok}/{} placements within SLO; median EO latency hyperdrive={} random={}",
            hd_edges.len(),
            hd_med.map_or("n/a".into(), |v| format!("{v:.2}ms")),
            rnd_med.map_or("n/a".into(), |v| format!("{v:.2}ms")),
        ),
    )
}

/// HyperDrive never places onto a satellite predicted above its recommended
/// temperature; Random and Round-robin each do at least once.
pub fn overheating(summary: &Summary) -> CheckResult {
    let name = "Overheating";
    let count = |k| summary.get(k).map(|s| (s.overheating_total.exceed_rec, s.overheating_total.satellite_placements));
    let hd = count(SchedulerKind::Hyperdrive);
    let rnd = count(SchedulerKind::Random);
    let rr = count(SchedulerKind::RoundRobin);
    let passed = matches!(hd, Some((0, _))) && matches!(rnd, Some((n, _)) if n > 0) && matches!(rr, Some((n, _)) if n > 0);
    let fmt = |c: Option<(usize, usize)>| c.map_or("not run".to_string(), |(e, n)| format!("{e}/{n}"));
    result(
        4,
        name,
        passed,
        format!(
            "above temp_rec / satellite placements: hyperdrive {}, random {}, round_robin {}",
            fmt(hd),
            fmt(rnd),
            fmt(rr)
        ),
    )
}

/// HyperDrive's per-task scheduling time grows linearly with size
/// (R^2 >= `min_r2`) and the largest size costs at most `max_ratio` times the smallest.
pub fn scalability(summary: &Summary, min_r2: f64, max_ratio: f64) -> CheckResult {
    let name = "Scalability";
    let hd = match require(summary, SchedulerKind::Hyperdrive) {
        Ok(s) => s,
        Err(e) => return result(5, name, false, e),
    };
    let series = &hd.scheduling_time;
    let (Some(first), Some(last), Some(fit)) = (series.first(), series.last(), hd.scheduling_time_fit) else {
        return result(5, name, false, "needs at least two sizes".into());
    };
    let ratio = last.mean_ms / first.mean_ms;
    let points = series
        .iter()
        .map(|p| format!("{}:{:.3}ms", p.size, p.mean_ms))
        .collect::<Vec<_>>()
        .join(" ");
    result(
        5,
        name,
        fit.r2 >= min_r2 && ratio <= max_ratio,
        format!("{points}; R^2={:.4}, ratio {}/{}={ratio:.2}", fit.r2, last.size, first.size),
    )
}

/// The five matrix-level checks with their default thresholds.
pub fn experiment_checks(records: &[ExperimentRecord], summary: &Summary) -> Vec<CheckResult> {
    vec![
        e2e_ordering(summary, 0.40),
        slo_compliance(summary),
        eo_slo(records, summary),
        overheating(summary),
        scalability(summary, 0.9, 6.0),
    ]
}
