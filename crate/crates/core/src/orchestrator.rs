//! In-memory authority over node state.
//!
//! Schedulers sample point-in-time node snapshots, score them, and then ask
//! the orchestrator to commit. A commit re-checks the resource constraint
//! against the node's current free capacity under that node's lock, so
//! concurrent schedulers can only lose a race, never overbook a node.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::Mutex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::GeoPosition;
use crate::infra::{Infrastructure, NodeSnapshot};
use crate::model::{NodeId, NodeKind, NodeResources, ResourceSpec, ResourceVector, TaskId};
use crate::scheduler::vicinity::{allocate_quotas, PerKind, VicinityConfig};
use crate::thermal::ThermalState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrchestratorError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown task {0}")]
    UnknownTask(TaskId),
    #[error("task {0} is already placed")]
    AlreadyPlaced(TaskId),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommitRequest {
    pub task: TaskId,
    pub node: NodeId,
    pub resources: ResourceSpec,
    pub scheduler: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommitOutcome {
    Committed,
    Conflict,
}

#[derive(Clone, Debug)]
struct NodeState {
    resources: NodeResources,
    position: GeoPosition,
    thermal: Option<ThermalState>,
}

#[derive(Clone, Debug)]
struct Placement {
    node: NodeId,
    amounts: ResourceVector,
}

/// Rival that claims the target node's free capacity right before a commit
/// is checked, with a fixed probability per attempt.
#[derive(Debug)]
struct ConflictAdversary {
    probability: f64,
    rng: ChaCha8Rng,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitStats {
    pub committed: u64,
    pub conflicts: u64,
    pub injected: u64,
}

pub struct Orchestrator {
    infra: Arc<Infrastructure>,
    nodes: Vec<Mutex<NodeState>>,
    placements: Mutex<HashMap<TaskId, Placement>>,
    adversary: Mutex<Option<ConflictAdversary>>,
    committed: AtomicU64,
    conflicts: AtomicU64,
    injected: AtomicU64,
}

const ADVERSARY_PREFIX: &str = "__adversary/";

impl Orchestrator {
    /// Positions are taken at t = 0 until the first clock tick.
    pub fn new(infra: Arc<Infrastructure>) -> Self {
        let nodes = infra
            .nodes()
            .iter()
            .map(|n| {
                Mutex::new(NodeState {
                    resources: n.resources.clone(),
                    position: n.position.position_at(0.0),
                    thermal: None,
                })
            })
            .collect();
        Orchestrator {
            infra,
            nodes,
            placements: Mutex::new(HashMap::new()),
            adversary: Mutex::new(None),
            committed: AtomicU64::new(0),
            conflicts: AtomicU64::new(0),
            injected: AtomicU64::new(0),
        }
    }

    pub fn infrastructure(&self) -> &Arc<Infrastructure> {
        &self.infra
    }

    /// Enables conflict injection: each commit attempt on a schedulable node
    /// first loses that node to a rival with `probability`.
    pub fn inject_conflicts(&self, probability: f64, seed: u64) {
        *self.adversary.lock() = Some(ConflictAdversary {
            probability: probability.clamp(0.0, 1.0),
            rng: ChaCha8Rng::seed_from_u64(seed),
        });
    }

    pub fn disable_conflicts(&self) {
        *self.adversary.lock() = None;
    }

    fn state(&self, id: NodeId) -> Result<&Mutex<NodeState>, OrchestratorError> {
        self.nodes.get(id.index()).ok_or(OrchestratorError::UnknownNode(id))
    }

    /// Clock tick: moves nodes to `positions` and refreshes satellite
    /// temperatures from `environment_temp`, decaying execution heat.
    pub fn advance_clock(
        &self,
        t_s: f64,
        positions: &[GeoPosition],
        mut environment_temp: impl FnMut(NodeId) -> Option<f64>,
    ) {
        for (i, cell) in self.nodes.iter().enumerate() {
            let record = &self.infra.nodes()[i];
            let mut st = cell.lock();
            if let Some(p) = positions.get(i) {
                st.position = *p;
            }
            if record.kind != NodeKind::Satellite {
                continue;
            }
            let Some(env) = environment_temp(record.id) else { continue };
            let cooling = record.thermal.map_or(0.0, |s| s.passive_cooling_rate);
            let heat = st.thermal.map_or(0.0, |th| {
                (th.accumulated_exec_heat_c - cooling * (t_s - th.updated_at_s).max(0.0)).max(0.0)
            });
            st.thermal = Some(ThermalState {
                current_temp_c: env + heat,
                accumulated_exec_heat_c: heat,
                updated_at_s: t_s,
            });
        }
    }

    /// Adds execution heat of a placed task to a node's thermal state.
    pub fn record_heat(&self, node: NodeId, delta_c: f64) -> Result<(), OrchestratorError> {
        let mut st = self.state(node)?.lock();
        if let Some(th) = st.thermal.as_mut() {
            th.accumulated_exec_heat_c += delta_c;
            th.current_temp_c += delta_c;
        }
        Ok(())
    }

    /// Overrides a node's free capacity without a placement, e.g. to model
    /// background load. Clamped to the node total.
    pub fn set_free(&self, node: NodeId, free: ResourceVector) -> Result<(), OrchestratorError> {
        let mut st = self.state(node)?.lock();
        let total = st.resources.total;
        st.resources.free = ResourceVector {
            cpu_millicores: free.cpu_millicores.min(total.cpu_millicores),
            memory_bytes: free.memory_bytes.min(total.memory_bytes),
            gpu_cores: free.gpu_cores.min(total.gpu_cores),
            storage_bytes: free.storage_bytes.min(total.storage_bytes),
        };
        Ok(())
    }

    pub fn set_battery(&self, node: NodeId, charge: f64) -> Result<(), OrchestratorError> {
        let mut st = self.state(node)?.lock();
        if st.resources.battery_charge.is_some() {
            st.resources.battery_charge = Some(charge.clamp(0.0, 1.0));
        }
        Ok(())
    }

    pub fn snapshot(&self, id: NodeId) -> Result<NodeSnapshot, OrchestratorError> {
        let st = self.state(id)?.lock();
        Ok(NodeSnapshot {
            record: self.infra.nodes()[id.index()].clone(),
            resources: st.resources.clone(),
            position: st.position,
            thermal: st.thermal,
        })
    }

    pub fn snapshot_all(&self) -> Vec<NodeSnapshot> {
        (0..self.nodes.len())
            .map(|i| self.snapshot(NodeId(i as u32)).expect("dense ids"))
            .collect()
    }

    pub fn position(&self, id: NodeId) -> Result<GeoPosition, OrchestratorError> {
        Ok(self.state(id)?.lock().position)
    }

    /// Samples schedulable nodes within each kind's radius of `anchor`, up to
    /// the candidate-set size split by the configured quotas. Output is in
    /// node-id order.
    pub fn sample_nodes<R: Rng + ?Sized>(
        &self,
        anchor: &GeoPosition,
        cfg: &VicinityConfig,
        rng: &mut R,
    ) -> Vec<NodeSnapshot> {
        let mut in_range: PerKind<Vec<NodeId>> = PerKind::default();
        for (i, cell) in self.nodes.iter().enumerate() {
            let record = &self.infra.nodes()[i];
            if !record.schedulable || cfg.quotas.get_f(record.kind) <= 0.0 {
                continue;
            }
            let pos = cell.lock().position;
            if anchor.surface_distance_km(&pos) <= cfg.radius_km.get_f(record.kind) {
                in_range.get_mut(record.kind).push(record.id);
            }
        }
        let available = in_range.map(|v| v.len());
        let counts = allocate_quotas(&available, &cfg.quotas, cfg.candidate_set_size);
        let mut chosen = Vec::new();
        for kind in NodeKind::ALL {
            let pool = in_range.get(kind);
            let take = *counts.get(kind);
            if take >= pool.len() {
                chosen.extend_from_slice(pool);
            } else {
                let mut idx = rand::seq::index::sample(rng, pool.len(), take).into_vec();
                idx.sort_unstable();
                chosen.extend(idx.into_iter().map(|i| pool[i]));
            }
        }
        chosen.sort_unstable();
        chosen
            .into_iter()
            .map(|id| self.snapshot(id).expect("sampled ids exist"))
            .collect()
    }

    /// Atomically re-checks the resource constraint and, on success, deducts
    /// the demand and records the placement.
    pub fn try_commit(&self, req: &CommitRequest) -> Result<CommitOutcome, OrchestratorError> {
        let cell = self.state(req.node)?;
        if self.placements.lock().contains_key(&req.task) {
            return Err(OrchestratorError::AlreadyPlaced(req.task.clone()));
        }
        // Rival schedulers only see schedulable nodes.
        let rival = self.infra.nodes()[req.node.index()].schedulable && {
            let mut adv = self.adversary.lock();
            match adv.as_mut() {
                Some(a) => a.rng.random_bool(a.probability),
                None => false,
            }
        };
        let mut st = cell.lock();
        if rival {
            let claim = st.resources.free;
            st.resources.free = ResourceVector::ZERO;
            let n = self.injected.fetch_add(1, Ordering::Relaxed);
            self.placements.lock().insert(
                TaskId(format!("{ADVERSARY_PREFIX}{n}")),
                Placement {
                    node: req.node,
                    amounts: claim,
                },
            );
        }
        if !st.resources.satisfies(&req.resources) {
            self.conflicts.fetch_add(1, Ordering::Relaxed);
            return Ok(CommitOutcome::Conflict);
        }
        let mut placements = self.placements.lock();
        if placements.contains_key(&req.task) {
            return Err(OrchestratorError::AlreadyPlaced(req.task.clone()));
        }
        st.resources.free = st
            .resources
            .free
            .checked_sub(&req.resources.amounts)
            .expect("checked by satisfies");
        placements.insert(
            req.task.clone(),
            Placement {
                node: req.node,
                amounts: req.resources.amounts,
            },
        );
        self.committed.fetch_add(1, Ordering::Relaxed);
        Ok(CommitOutcome::Committed)
    }

    /// Returns a committed task's resources to its node.
    pub fn release(&self, task: &TaskId) -> Result<ResourceVector, OrchestratorError> {
        let placement = self
            .placements
            .lock()
            .remove(task)
            .ok_or_else(|| OrchestratorError::UnknownTask(task.clone()))?;
        let mut st = self.nodes[placement.node.index()].lock();
        let free = st
            .resources
            .free
            .checked_add(&placement.amounts)
            .expect("resource overflow");
        debug_assert!(free.fits_within(&st.resources.total), "free exceeds total");
        st.resources.free = free;
        Ok(placement.amounts)
    }

    /// Releases every claim made by the conflict adversary.
    pub fn release_adversary_claims(&self) -> usize {
        let keys: Vec<TaskId> = self
            .placements
            .lock()
            .keys()
            .filter(|k| k.as_str().starts_with(ADVERSARY_PREFIX))
            .cloned()
            .collect();
        for k in &keys {
            let _ = self.release(k);
        }
        keys.len()
    }

    pub fn placement_of(&self, task: &TaskId) -> Option<NodeId> {
        self.placements.lock().get(task).map(|p| p.node)
    }

    pub fn stats(&self) -> CommitStats {
        CommitStats {
            committed: self.committed.load(Ordering::Relaxed),
            conflicts: self.conflicts.load(Ordering::Relaxed),
            injected: self.injected.load(Ordering::Relaxed),
        }
    }

    /// Checks `free <= total` on every node and, at quiescent points, that
    /// committed demand plus free capacity equals the capacity a node had
    /// before any placement (`baseline_free`, usually its total).
    pub fn audit(&self, baseline_free: impl Fn(NodeId) -> ResourceVector) -> Result<(), String> {
        let placements = self.placements.lock();
        let mut used: Vec<ResourceVector> = vec![ResourceVector::ZERO; self.nodes.len()];
        for p in placements.values() {
            let u = &mut used[p.node.index()];
            *u = u.checked_add(&p.amounts).ok_or("placement overflow")?;
        }
        for (i, cell) in self.nodes.iter().enumerate() {
            let st = cell.lock();
            let id = NodeId(i as u32);
            if !st.resources.free.fits_within(&st.resources.total) {
                return Err(format!("{id}: free exceeds total"));
            }
            let sum = used[i].checked_add(&st.resources.free).ok_or("overflow")?;
            if sum != baseline_free(id) {
                return Err(format!("{id}: committed {:?} + free {:?} != {:?}", used[i], st.resources.free, baseline_free(id)));
            }
        }
        Ok(())
    }
}
