//! Task placement: the HyperDrive pipeline and baseline schedulers.
//!
//! HyperDrive runs vicinity sampling, resource and network-SLO filtering,
//! latency and temperature scoring, and multi-commit for one task at a time.

pub mod baselines;
pub mod commit;
pub mod filters;
pub mod scoring;
pub mod vicinity;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LookupError, SchedulingError};
use crate::model::{NodeId, Outcome, ScoreBreakdown, SchedulingDecision, TaskId, WorkflowDag};
use crate::netgraph::NetworkGraph;
use crate::orchestrator::{CommitOutcome, CommitRequest, Orchestrator};
use crate::thermal::{score_node_temperature, ThermalEnvironment};

pub use baselines::{FirstFit, RandomScheduler, RoundRobin};
pub use commit::{multi_commit, CommitConfig, CommitResult};
pub use filters::{filter_network_slos, filter_resources, IncomingSlos};
pub use scoring::{score_network_latency, ScoreWeights};
pub use vicinity::{select_candidates, PerKind, VicinityConfig};

/// World state a scheduler sees while placing one task.
#[derive(Clone, Copy)]
pub struct SchedulingContext<'a> {
    pub graph: &'a NetworkGraph,
    pub time_s: f64,
    pub thermal: &'a ThermalEnvironment,
}

pub trait Scheduler {
    fn name(&self) -> &str;

    /// Places `task` and records the placement in `dag` on success. An
    /// unplaceable task is reported as a failed decision, not an error.
    fn schedule(
        &mut self,
        task: &TaskId,
        dag: &mut WorkflowDag,
        ctx: &SchedulingContext<'_>,
        orch: &Orchestrator,
    ) -> Result<SchedulingDecision, SchedulingError>;
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HyperDriveConfig {
    pub vicinity: VicinityConfig,
    pub weights: ScoreWeights,
    pub commit: CommitConfig,
}

pub struct HyperDrive {
    cfg: HyperDriveConfig,
    rng: ChaCha8Rng,
    name: String,
}

impl HyperDrive {
    pub fn new(cfg: HyperDriveConfig, seed: u64) -> Self {
        HyperDrive {
            cfg,
            rng: ChaCha8Rng::seed_from_u64(seed),
            name: "hyperdrive".into(),
        }
    }

    pub fn config(&self) -> &HyperDriveConfig {
        &self.cfg
    }

    /// Scores every node that passes both filters, best first.
    pub fn rank_eligible(
        &self,
        task: &TaskId,
        dag: &WorkflowDag,
        candidates: &[crate::infra::NodeSnapshot],
        incoming: &IncomingSlos<'_>,
        ctx: &SchedulingContext<'_>,
    ) -> Result<Vec<ScoreBreakdown>, SchedulingError> {
        let spec = dag.task(task).ok_or_else(|| LookupError::Task(task.clone()))?;
        let eligible: Vec<_> = candidates
            .iter()
            .filter(|n| filter_resources(spec, n) && incoming.admits(n.id()))
            .collect();
        let raws: Vec<f64> = eligible.iter().map(|n| incoming.worst_latency_ms(n.id())).collect();
        let latency_scores = score_network_latency(&raws);
        let mut scores = Vec::with_capacity(eligible.len());
        for ((node, raw), lat) in eligible.iter().zip(raws).zip(latency_scores) {
            let temp = score_node_temperature(spec, &node.thermal_view(), ctx.time_s, ctx.thermal)?;
            let temperature_score = temp.score as f64;
            scores.push(ScoreBreakdown {
                node: node.id(),
                worst_latency_ms: raw,
                latency_score: lat,
                temperature_score,
                aggregate: self.cfg.weights.aggregate(lat, temperature_score),
            });
        }
        scoring::sort_by_rank(&mut scores);
        Ok(scores)
    }
}

impl Scheduler for HyperDrive {
    fn name(&self) -> &str {
        &self.name
    }

    fn schedule(
        &mut self,
        task: &TaskId,
        dag: &mut WorkflowDag,
        ctx: &SchedulingContext<'_>,
        orch: &Orchestrator,
    ) -> Result<SchedulingDecision, SchedulingError> {
        let started = Instant::now();
        let spec = dag.task(task).ok_or_else(|| LookupError::Task(task.clone()))?.clone();
        filters::check_predecessors_placed(task, dag)?;
        let anchor = vicinity::resolve_anchor(task, dag, orch)?;
        let incoming = IncomingSlos::prepare(task, dag, orch.infrastructure(), ctx.graph)?;

        let mut decision = SchedulingDecision {
            task: task.clone(),
            scheduler: self.name.clone(),
            chosen: None,
            candidate_count: 0,
            eligible_count: 0,
            scores: Vec::new(),
            commit_attempts: 0,
            restarts: 0,
            wall_time_ms: 0.0,
            outcome: Outcome::Failed {
                reason: "commit conflicts exhausted".into(),
            },
        };
        for pass in 0..=self.cfg.commit.max_restarts {
            decision.restarts = pass;
            let candidates = orch.sample_nodes(&anchor, &self.cfg.vicinity, &mut self.rng);
            decision.candidate_count = candidates.len();
            if candidates.is_empty() {
                decision.outcome = Outcome::Failed {
                    reason: "no candidates in vicinity".into(),
                };
                break;
            }
            let scores = self.rank_eligible(task, dag, &candidates, &incoming, ctx)?;
            decision.eligible_count = scores.len();
            if scores.is_empty() {
                decision.scores = scores;
                decision.outcome = Outcome::Failed {
                    reason: "no eligible node".into(),
                };
                break;
            }
            let ranked: Vec<NodeId> = scores.iter().map(|s| s.node).collect();
            decision.scores = scores;
            match multi_commit(task, &spec.resources, &ranked, self.cfg.commit.attempts, &self.name, orch)? {
                CommitResult::Committed { node, attempts } => {
                    decision.commit_attempts = attempts;
                    decision.chosen = Some(node);
                    decision.outcome = Outcome::Committed;
                    dag.placements.insert(task.clone(), node);
                    break;
                }
                CommitResult::Reschedule { attempts } => decision.commit_attempts = attempts,
            }
        }
        decision.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        Ok(decision)
    }
}

/// Places a task bound to a named node, bypassing any scheduler.
pub fn place_pinned(
    task: &TaskId,
    dag: &mut WorkflowDag,
    orch: &Orchestrator,
    scheduler: &str,
) -> Result<SchedulingDecision, SchedulingError> {
    let spec = dag.task(task).ok_or_else(|| LookupError::Task(task.clone()))?.clone();
    let host = spec.pinned_to.as_deref().ok_or_else(|| SchedulingError::Unschedulable {
        task: task.clone(),
        reason: "task is not pinned".into(),
    })?;
    let node = orch.infrastructure().by_name(host)?;
    let outcome = orch.try_commit(&CommitRequest {
        task: task.clone(),
        node,
        resources: spec.resources.clone(),
        scheduler: scheduler.to_owned(),
    })?;
    let committed = outcome == CommitOutcome::Committed;
    if committed {
        dag.placements.insert(task.clone(), node);
    }
    Ok(SchedulingDecision {
        task: task.clone(),
        scheduler: scheduler.to_owned(),
        chosen: committed.then_some(node),
        candidate_count: 1,
        eligible_count: usize::from(committed),
        scores: Vec::new(),
        commit_attempts: 1,
        restarts: 0,
        wall_time_ms: 0.0,
        outcome: if committed {
            Outcome::Committed
        } else {
            Outcome::Failed {
                reason: "pinned node lacks resources".into(),
            }
        },
    })
}
