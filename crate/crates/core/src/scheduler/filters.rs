//! Hard-constraint filters applied to the candidate set.

use crate::error::{LookupError, SchedulingError};
use crate::infra::{Infrastructure, NodeSnapshot};
use crate::model::{EdgeSource, NetworkQos, NetworkSlo, NodeId, SloDimension, TaskId, WorkflowDag, WorkflowTask};
use crate::netgraph::{NetworkGraph, PathTree};

/// Resource filter: keeps the node iff its free capacity satisfies the demand.
pub fn filter_resources(task: &WorkflowTask, node: &NodeSnapshot) -> bool {
    node.resources.satisfies(&task.resources)
}

/// An incoming workflow edge whose source is already placed.
#[derive(Clone, Debug)]
pub struct IncomingSlo {
    pub from: String,
    pub host: NodeId,
    pub slo: NetworkSlo,
}

/// Incoming SLO edges of a task with one shortest-path tree per distinct
/// source host, so every candidate costs one lookup per edge.
pub struct IncomingSlos<'g> {
    edges: Vec<IncomingSlo>,
    trees: Vec<(NodeId, PathTree<'g>)>,
}

/// Host of a workflow vertex: a placed task's node or a data source's host.
pub fn host_of(from: &str, dag: &WorkflowDag, infra: &Infrastructure) -> Result<Option<NodeId>, LookupError> {
    match dag.vertex(from) {
        Some(EdgeSource::Task(t)) => Ok(dag.placements.get(&t.id).copied()),
        Some(EdgeSource::DataSource(ds)) => infra.by_name(&ds.host).map(Some),
        None => Err(LookupError::Task(TaskId::new(from))),
    }
}

/// Fails with a pipeline-order error if any predecessor task is unplaced.
pub fn check_predecessors_placed(task: &TaskId, dag: &WorkflowDag) -> Result<(), SchedulingError> {
    for pred in dag.task_predecessors(task) {
        if !dag.placements.contains_key(&pred.id) {
            return Err(SchedulingError::PipelineOrder {
                task: task.clone(),
                predecessor: pred.id.to_string(),
            });
        }
    }
    Ok(())
}

impl<'g> IncomingSlos<'g> {
    pub fn prepare(
        task: &TaskId,
        dag: &WorkflowDag,
        infra: &Infrastructure,
        graph: &'g NetworkGraph,
    ) -> Result<Self, SchedulingError> {
        let mut edges = Vec::new();
        let mut trees: Vec<(NodeId, PathTree<'g>)> = Vec::new();
        for e in dag.incoming(task) {
            let Some(slo) = e.slo else { continue };
            let host = host_of(&e.from, dag, infra)?.ok_or_else(|| SchedulingError::PipelineOrder {
                task: task.clone(),
                predecessor: e.from.clone(),
            })?;
            if !trees.iter().any(|(h, _)| *h == host) {
                trees.push((host, graph.shortest_paths_from(host)?));
            }
            edges.push(IncomingSlo {
                from: e.from.clone(),
                host,
                slo,
            });
        }
        Ok(IncomingSlos { edges, trees })
    }

    pub fn edges(&self) -> &[IncomingSlo] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// QoS of the lowest-latency path from `host` to `node`; local when equal.
    pub fn qos(&self, host: NodeId, node: NodeId) -> Option<NetworkQos> {
        if host == node {
            return Some(NetworkQos::LOCAL);
        }
        let (_, tree) = self.trees.iter().find(|(h, _)| *h == host)?;
        tree.qos_to(node)
    }

    /// First SLO edge the node would breach, if any.
    pub fn first_violation(&self, node: NodeId) -> Option<(&IncomingSlo, SloDimension)> {
        self.edges.iter().find_map(|e| {
            e.slo
                .check(self.qos(e.host, node).as_ref())
                .err()
                .map(|d| (e, d))
        })
    }

    pub fn admits(&self, node: NodeId) -> bool {
        self.first_violation(node).is_none()
    }

    /// Highest path latency over the SLO edges; 0 without edges, infinite
    /// if any source is unreachable.
    pub fn worst_latency_ms(&self, node: NodeId) -> f64 {
        self.edges
            .iter()
            .map(|e| self.qos(e.host, node).map_or(f64::INFINITY, |q| q.latency_ms))
            .fold(0.0, f64::max)
    }
}

/// Network SLO filter for a single node. Prefer [`IncomingSlos`] when
/// checking many nodes for the same task.
pub fn filter_network_slos(
    task: &TaskId,
    node: NodeId,
    dag: &WorkflowDag,
    infra: &Infrastructure,
    graph: &NetworkGraph,
) -> Result<bool, SchedulingError> {
    Ok(IncomingSlos::prepare(task, dag, infra, graph)?.admits(node))
}
