//! Candidate sampling around a task's location anchor.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, SchedulingError};
use crate::geo::GeoPosition;
use crate::infra::NodeSnapshot;
use crate::model::{NodeKind, TaskId, WorkflowDag};
use crate::orchestrator::Orchestrator;

/// One value per node kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerKind<T> {
    pub cloud: T,
    pub edge: T,
    pub ground_station: T,
    pub satellite: T,
}

impl<T> PerKind<T> {
    pub fn get(&self, kind: NodeKind) -> &T {
        match kind {
            NodeKind::Cloud => &self.cloud,
            NodeKind::Edge => &self.edge,
            NodeKind::GroundStation => &self.ground_station,
            NodeKind::Satellite => &self.satellite,
        }
    }

    pub fn get_mut(&mut self, kind: NodeKind) -> &mut T {
        match kind {
            NodeKind::Cloud => &mut self.cloud,
            NodeKind::Edge => &mut self.edge,
            NodeKind::GroundStation => &mut self.ground_station,
            NodeKind::Satellite => &mut self.satellite,
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> PerKind<U> {
        PerKind {
            cloud: f(&self.cloud),
            edge: f(&self.edge),
            ground_station: f(&self.ground_station),
            satellite: f(&self.satellite),
        }
    }
}

impl PerKind<f64> {
    pub fn get_f(&self, kind: NodeKind) -> f64 {
        *self.get(kind)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VicinityConfig {
    /// Search radius around the anchor, measured along the surface.
    pub radius_km: PerKind<f64>,
    pub candidate_set_size: usize,
    /// Share of the candidate set per kind. Kinds with a zero quota are never sampled.
    pub quotas: PerKind<f64>,
}

impl Default for VicinityConfig {
    fn default() -> Self {
        VicinityConfig {
            radius_km: PerKind {
                cloud: 500.0,
                edge: 200.0,
                ground_station: 200.0,
                satellite: 2000.0,
            },
            candidate_set_size: 500,
            quotas: PerKind {
                cloud: 0.4,
                edge: 0.4,
                ground_station: 0.0,
                satellite: 0.1,
            },
        }
    }
}

impl VicinityConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut sum = 0.0;
        for kind in NodeKind::ALL {
            let q = self.quotas.get_f(kind);
            if !(0.0..=1.0).contains(&q) {
                return Err(ConfigError::invalid(format!("vicinity.quotas.{kind}"), "must lie in [0, 1]"));
            }
            sum += q;
            if !(self.radius_km.get_f(kind) >= 0.0) {
                return Err(ConfigError::invalid(format!("vicinity.radius_km.{kind}"), "must be non-negative"));
            }
        }
        if sum > 1.0 + 1e-9 {
            return Err(ConfigError::invalid("vicinity.quotas", "must sum to at most 1"));
        }
        if self.candidate_set_size == 0 {
            return Err(ConfigError::invalid("vicinity.candidate_set_size", "must be positive"));
        }
        Ok(())
    }
}

/// Splits `size` slots across kinds.
///
/// Each kind with a positive quota first gets `floor(size * quota)` capped at
/// its availability. Unused slots are then handed out in proportion to the
/// quotas of kinds that still have spare nodes (largest remainder, ties to
/// the earlier kind), until the set is full or every kind is exhausted.
pub fn allocate_quotas(available: &PerKind<usize>, quotas: &PerKind<f64>, size: usize) -> PerKind<usize> {
    let mut counts = PerKind::<usize>::default();
    for kind in NodeKind::ALL {
        let q = quotas.get_f(kind);
        if q > 0.0 {
            let base = (size as f64 * q).floor() as usize;
            *counts.get_mut(kind) = base.min(*available.get(kind));
        }
    }
    loop {
        let total: usize = NodeKind::ALL.iter().map(|k| *counts.get(*k)).sum();
        if total >= size {
            break;
        }
        let leftover = size - total;
        let active: Vec<NodeKind> = NodeKind::ALL
            .into_iter()
            .filter(|k| quotas.get_f(*k) > 0.0 && counts.get(*k) < available.get(*k))
            .collect();
        if active.is_empty() {
            break;
        }
        let qsum: f64 = active.iter().map(|k| quotas.get_f(*k)).sum();
        let exact: Vec<f64> = active
            .iter()
            .map(|k| leftover as f64 * quotas.get_f(*k) / qsum)
            .collect();
        let mut shares: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let mut rest = leftover - shares.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..active.len()).collect();
        order.sort_by(|&a, &b| {
            let fa = exact[a] - exact[a].floor();
            let fb = exact[b] - exact[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for &i in &order {
            if rest == 0 {
                break;
            }
            shares[i] += 1;
            rest -= 1;
        }
        for (k, share) in active.iter().zip(shares) {
            let spare = available.get(*k) - counts.get(*k);
            *counts.get_mut(*k) += share.min(spare);
        }
    }
    counts
}

/// Location a task's candidates are sampled around: its preferred location,
/// else the host of its first placed predecessor task.
pub fn resolve_anchor(task: &TaskId, dag: &WorkflowDag, orch: &Orchestrator) -> Result<GeoPosition, SchedulingError> {
    let spec = dag
        .task(task)
        .ok_or_else(|| crate::error::LookupError::Task(task.clone()))?;
    if let Some(p) = &spec.preferred_location {
        return Ok(GeoPosition::from_geodetic(p));
    }
    for pred in dag.task_predecessors(task) {
        if let Some(node) = dag.placements.get(&pred.id) {
            return orch
                .position(*node)
                .map_err(|_| crate::error::LookupError::Node(*node).into());
        }
    }
    Err(SchedulingError::Unanchored(task.clone()))
}

/// Samples the candidate set for `task`.
pub fn select_candidates<R: Rng + ?Sized>(
    task: &TaskId,
    dag: &WorkflowDag,
    orch: &Orchestrator,
    cfg: &VicinityConfig,
    rng: &mut R,
) -> Result<Vec<NodeSnapshot>, SchedulingError> {
    let anchor = resolve_anchor(task, dag, orch)?;
    Ok(orch.sample_nodes(&anchor, cfg, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn avail(c: usize, e: usize, g: usize, s: usize) -> PerKind<usize> {
        PerKind {
            cloud: c,
            edge: e,
            ground_station: g,
            satellite: s,
        }
    }

    fn sum(p: &PerKind<usize>) -> usize {
        p.cloud + p.edge + p.ground_station + p.satellite
    }

    #[test]
    fn abundant_supply_redistributes_the_unassigned_share() {
        let q = VicinityConfig::default().quotas;
        let c = allocate_quotas(&avail(1000, 1000, 1000, 1000), &q, 500);
        assert_eq!((c.cloud, c.edge, c.ground_station, c.satellite), (222, 222, 0, 56));
    }

    #[test]
    fn scarce_kind_spills_into_others() {
        let q = VicinityConfig::default().quotas;
        let c = allocate_quotas(&avail(10, 1000, 50, 1000), &q, 500);
        assert_eq!(c.cloud, 10);
        assert_eq!(c.ground_station, 0);
        assert_eq!(sum(&c), 500);
        assert!(c.edge > c.satellite);
    }

    #[test]
    fn everything_taken_when_supply_is_short() {
        let q = VicinityConfig::default().quotas;
        let c = allocate_quotas(&avail(3, 4, 9, 5), &q, 500);
        assert_eq!((c.cloud, c.edge, c.ground_station, c.satellite), (3, 4, 0, 5));
    }

    #[test]
    fn quota_validation() {
        let mut cfg = VicinityConfig::default();
        cfg.validate().unwrap();
        cfg.quotas.edge = 0.9;
        assert!(cfg.validate().is_err());
    }
}
