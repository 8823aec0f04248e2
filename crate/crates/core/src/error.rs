use std::path::PathBuf;

use thiserror::Error;

use crate::model::{NodeId, TaskId};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("unknown node {0}")]
    Node(NodeId),
    #[error("unknown node name `{0}`")]
    NodeName(String),
    #[error("unknown task {0}")]
    Task(TaskId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchedulingError {
    #[error("task {0} has no location anchor")]
    Unanchored(TaskId),
    #[error("task {task} scheduled before predecessor {predecessor} was placed")]
    PipelineOrder { task: TaskId, predecessor: String },
    #[error(transparent)]
    Lookup(#[from] LookupError),
    #[error(transparent)]
    Orchestrator(#[from] crate::orchestrator::OrchestratorError),
    #[error(transparent)]
    Thermal(#[from] crate::thermal::ThermalError),
    #[error("task {task} is unschedulable: {reason}")]
    Unschedulable { task: TaskId, reason: String },
}
