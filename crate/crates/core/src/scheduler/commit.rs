//! Commit phase: try the best-ranked nodes in order.

use serde::{Deserialize, Serialize};

use crate::model::{NodeId, ResourceSpec, TaskId};
use crate::orchestrator::{CommitOutcome, CommitRequest, Orchestrator, OrchestratorError};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CommitConfig {
    /// Nodes tried per pipeline pass (1 means single-commit).
    pub attempts: usize,
    /// Pipeline passes repeated after every attempted node conflicted.
    pub max_restarts: u32,
}

impl Default for CommitConfig {
    fn default() -> Self {
        CommitConfig {
            attempts: 3,
            max_restarts: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommitResult {
    Committed { node: NodeId, attempts: u32 },
    /// Every attempted node conflicted; the caller should re-run the pipeline.
    Reschedule { attempts: u32 },
}

/// Commits `task` to the first node of `ranked[..attempts]` that still fits.
pub fn multi_commit(
    task: &TaskId,
    resources: &ResourceSpec,
    ranked: &[NodeId],
    attempts: usize,
    scheduler: &str,
    orch: &Orchestrator,
) -> Result<CommitResult, OrchestratorError> {
    let mut made = 0;
    for &node in ranked.iter().take(attempts.max(1)) {
        made += 1;
        let req = CommitRequest {
            task: task.clone(),
            node,
            resources: resources.clone(),
            scheduler: scheduler.to_owned(),
        };
        if orch.try_commit(&req)? == CommitOutcome::Committed {
            return Ok(CommitResult::Committed { node, attempts: made });
        }
    }
    Ok(CommitResult::Reschedule { attempts: made })
}
