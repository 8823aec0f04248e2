//! Resource-only baseline schedulers. They see every schedulable node in
//! id order, ignore network SLOs and temperature, and commit once.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Scheduler, SchedulingContext};
use crate::error::{LookupError, SchedulingError};
use crate::infra::NodeSnapshot;
use crate::model::{NodeId, Outcome, SchedulingDecision, TaskId, WorkflowDag};
use crate::orchestrator::{CommitOutcome, CommitRequest, Orchestrator};

fn feasible(task: &TaskId, dag: &WorkflowDag, orch: &Orchestrator) -> Result<(usize, Vec<NodeSnapshot>), SchedulingError> {
    let spec = dag.task(task).ok_or_else(|| LookupError::Task(task.clone()))?;
    let all: Vec<NodeSnapshot> = orch
        .snapshot_all()
        .into_iter()
        .filter(|n| n.record.schedulable)
        .collect();
    let total = all.len();
    let ok = all.into_iter().filter(|n| n.resources.satisfies(&spec.resources)).collect();
    Ok((total, ok))
}

fn commit_choice(
    name: &str,
    task: &TaskId,
    dag: &mut WorkflowDag,
    orch: &Orchestrator,
    candidate_count: usize,
    eligible_count: usize,
    choice: Option<NodeId>,
    started: Instant,
) -> Result<SchedulingDecision, SchedulingError> {
    let mut decision = SchedulingDecision {
        task: task.clone(),
        scheduler: name.to_owned(),
        chosen: None,
        candidate_count,
        eligible_count,
        scores: Vec::new(),
        commit_attempts: 0,
        restarts: 0,
        wall_time_ms: 0.0,
        outcome: Outcome::Failed {
            reason: "no eligible node".into(),
        },
    };
    if let Some(node) = choice {
        let resources = dag.task(task).ok_or_else(|| LookupError::Task(task.clone()))?.resources.clone();
        decision.commit_attempts = 1;
        let req = CommitRequest {
            task: task.clone(),
            node,
            resources,
            scheduler: name.to_owned(),
        };
        if orch.try_commit(&req)? == CommitOutcome::Committed {
            decision.chosen = Some(node);
            decision.outcome = Outcome::Committed;
            dag.placements.insert(task.clone(), node);
        } else {
            decision.outcome = Outcome::Failed {
                reason: "commit conflict".into(),
            };
        }
    }
    decision.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(decision)
}

/// Uniformly random feasible node.
pub struct RandomScheduler {
    rng: ChaCha8Rng,
}

impl RandomScheduler {
    pub fn new(seed: u64) -> Self {
        RandomScheduler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Scheduler for RandomScheduler {
    fn name(&self) -> &str {
        "random"
    }

    fn schedule(
        &mut self,
        task: &TaskId,
        dag: &mut WorkflowDag,
        _ctx: &SchedulingContext<'_>,
        orch: &Orchestrator,
    ) -> Result<SchedulingDecision, SchedulingError> {
        let started = Instant::now();
        let (total, ok) = feasible(task, dag, orch)?;
        let choice = (!ok.is_empty()).then(|| ok[self.rng.random_range(0..ok.len())].id());
        commit_choice(self.name(), task, dag, orch, total, ok.len(), choice, started)
    }
}

/// Lowest-id feasible node.
#[derive(Default)]
pub struct FirstFit;

impl Scheduler for FirstFit {
    fn name(&self) -> &str {
        "first_fit"
    }

    fn schedule(
        &mut self,
        task: &TaskId,
        dag: &mut WorkflowDag,
        _ctx: &SchedulingContext<'_>,
        orch: &Orchestrator,
    ) -> Result<SchedulingDecision, SchedulingError> {
        let started = Instant::now();
        let (total, ok) = feasible(task, dag, orch)?;
        let choice = ok.first().map(|n| n.id());
        commit_choice(self.name(), task, dag, orch, total, ok.len(), choice, started)
    }
}

/// Cycles through nodes, starting after the previous choice.
#[derive(Default)]
pub struct RoundRobin {
    cursor: u32,
}

impl Scheduler for RoundRobin {
    fn name(&self) -> &str {
        "round_robin"
    }

    fn schedule(
        &mut self,
        task: &TaskId,
        dag: &mut WorkflowDag,
        _ctx: &SchedulingContext<'_>,
        orch: &Orchestrator,
    ) -> Result<SchedulingDecision, SchedulingError> {
        let started = Instant::now();
        let (total, ok) = feasible(task, dag, orch)?;
        let choice = ok
            .iter()
            .find(|n| n.id().0 >= self.cursor)
            .or_else(|| ok.first())
            .map(|n| n.id());
        if let Some(n) = choice {
            self.cursor = n.0 + 1;
        }
        commit_choice(self.name(), task, dag, orch, total, ok.len(), choice, started)
    }
}
