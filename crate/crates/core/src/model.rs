//! Domain types shared by every part of the simulator: node identities and
//! kinds, integer resource vectors, network SLOs and path QoS, workflow DAGs
//! and scheduling decisions.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Dense node identifier. Ids index directly into infrastructure and graph
/// tables, and their numeric order is the stable order used by baselines and
/// tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub String);

impl TaskId {
    pub fn new(id: impl Into<String>) -> Self {
        TaskId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TaskId {
    fn from(s: &str) -> Self {
        TaskId(s.to_owned())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Cloud,
    Edge,
    /// Fixed ground terminals; drones are modelled as ground stations.
    GroundStation,
    Satellite,
}

impl NodeKind {
    pub const ALL: [NodeKind; 4] = [
        NodeKind::Cloud,
        NodeKind::Edge,
        NodeKind::GroundStation,
        NodeKind::Satellite,
    ];

    pub fn is_ground(self) -> bool {
        !matches!(self, NodeKind::Satellite)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NodeKind::Cloud => "cloud",
            NodeKind::Edge => "edge",
            NodeKind::GroundStation => "ground_station",
            NodeKind::Satellite => "satellite",
        };
        f.write_str(s)
    }
}

/// Integer resource amounts. CPU is counted in millicores and memory/storage
/// in bytes so capacity checks are exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceVector {
    #[serde(default)]
    pub cpu_millicores: u64,
    #[serde(default)]
    pub memory_bytes: u64,
    #[serde(default)]
    pub gpu_cores: u32,
    #[serde(default)]
    pub storage_bytes: u64,
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector {
        cpu_millicores: 0,
        memory_bytes: 0,
        gpu_cores: 0,
        storage_bytes: 0,
    };

    pub fn new(cpu_millicores: u64, memory_bytes: u64, gpu_cores: u32, storage_bytes: u64) -> Self {
        ResourceVector {
            cpu_millicores,
            memory_bytes,
            gpu_cores,
            storage_bytes,
        }
    }

    /// Componentwise `self <= other`.
    pub fn fits_within(&self, other: &ResourceVector) -> bool {
        self.cpu_millicores <= other.cpu_millicores
            && self.memory_bytes <= other.memory_bytes
            && self.gpu_cores <= other.gpu_cores
            && self.storage_bytes <= other.storage_bytes
    }

    pub fn checked_sub(&self, rhs: &ResourceVector) -> Option<ResourceVector> {
        Some(ResourceVector {
            cpu_millicores: self.cpu_millicores.checked_sub(rhs.cpu_millicores)?,
            memory_bytes: self.memory_bytes.checked_sub(rhs.memory_bytes)?,
            gpu_cores: self.gpu_cores.checked_sub(rhs.gpu_cores)?,
            storage_bytes: self.storage_bytes.checked_sub(rhs.storage_bytes)?,
        })
    }

    pub fn checked_add(&self, rhs: &ResourceVector) -> Option<ResourceVector> {
        Some(ResourceVector {
            cpu_millicores: self.cpu_millicores.checked_add(rhs.cpu_millicores)?,
            memory_bytes: self.memory_bytes.checked_add(rhs.memory_bytes)?,
            gpu_cores: self.gpu_cores.checked_add(rhs.gpu_cores)?,
            storage_bytes: self.storage_bytes.checked_add(rhs.storage_bytes)?,
        })
    }

    pub fn is_zero(&self) -> bool {
        *self == ResourceVector::ZERO
    }

    /// CPU in (fractional) cores.
    pub fn cpu_cores(&self) -> f64 {
        self.cpu_millicores as f64 / 1000.0
    }
}

/// Resource demand declared by a task.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceSpec {
    /// Required CPU architecture label; `None` accepts any architecture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpu_arch: Option<String>,
    #[serde(flatten)]
    pub amounts: ResourceVector,
    /// Minimum battery charge in `[0, 1]`, checked only on battery-powered nodes.
    #[serde(default)]
    pub min_battery_charge: f64,
}

impl ResourceSpec {
    pub fn new(amounts: ResourceVector) -> Self {
        ResourceSpec {
            cpu_arch: None,
            amounts,
            min_battery_charge: 0.0,
        }
    }
}

/// Node capacity and availability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeResources {
    pub cpu_arch: String,
    pub total: ResourceVector,
    pub free: ResourceVector,
    /// Present iff the node is battery powered.
    pub battery_charge: Option<f64>,
}

impl NodeResources {
    pub fn new(cpu_arch: impl Into<String>, total: ResourceVector) -> Self {
        NodeResources {
            cpu_arch: cpu_arch.into(),
            total,
            free: total,
            battery_charge: None,
        }
    }

    pub fn with_battery(mut self, charge: f64) -> Self {
        self.battery_charge = Some(charge);
        self
    }

    pub fn used(&self) -> ResourceVector {
        self.total
            .checked_sub(&self.free)
            .expect("free exceeds total")
    }

    /// Hard resource constraint: free capacity covers the demand, the
    /// architecture matches and the battery holds enough charge.
    pub fn satisfies(&self, demand: &ResourceSpec) -> bool {
        if let Some(arch) = &demand.cpu_arch {
            if *arch != self.cpu_arch {
                return false;
            }
        }
        if let Some(charge) = self.battery_charge {
            if charge < demand.min_battery_charge {
                return false;
            }
        }
        demand.amounts.fits_within(&self.free)
    }
}

/// Per-link network SLO. Absent fields are unconstrained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSlo {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_latency_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_bandwidth_bps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_jitter_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_packet_drop: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SloDimension {
    Latency,
    Bandwidth,
    Jitter,
    PacketDrop,
    /// No path exists between the endpoints.
    Disconnected,
}

impl NetworkSlo {
    pub fn max_latency(ms: f64) -> Self {
        NetworkSlo {
            max_latency_ms: Some(ms),
            ..Default::default()
        }
    }

    pub fn is_unconstrained(&self) -> bool {
        self.max_latency_ms.is_none()
            && self.min_bandwidth_bps.is_none()
            && self.max_jitter_ms.is_none()
            && self.max_packet_drop.is_none()
    }

    /// First breached dimension, checked in the order latency, bandwidth,
    /// jitter, packet drop. Rejection uses strict inequalities.
    pub fn first_breach(&self, qos: &NetworkQos) -> Option<SloDimension> {
        if matches!(self.max_latency_ms, Some(max) if qos.latency_ms > max) {
            return Some(SloDimension::Latency);
        }
        if matches!(self.min_bandwidth_bps, Some(min) if qos.bandwidth_bps < min) {
            return Some(SloDimension::Bandwidth);
        }
        if matches!(self.max_jitter_ms, Some(max) if qos.jitter_ms > max) {
            return Some(SloDimension::Jitter);
        }
        if matches!(self.max_packet_drop, Some(max) if qos.packet_drop > max) {
            return Some(SloDimension::PacketDrop);
        }
        None
    }

    /// Like [`first_breach`](Self::first_breach), treating a missing path as a breach.
    pub fn check(&self, qos: Option<&NetworkQos>) -> Result<(), SloDimension> {
        match qos {
            None => Err(SloDimension::Disconnected),
            Some(q) => self.first_breach(q).map_or(Ok(()), Err),
        }
    }

    fn range_violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let nonneg = |v: Option<f64>| v.is_some_and(|x| !(x >= 0.0));
        if nonneg(self.max_latency_ms) {
            out.push("max_latency_ms");
        }
        if nonneg(self.min_bandwidth_bps) {
            out.push("min_bandwidth_bps");
        }
        if nonneg(self.max_jitter_ms) {
            out.push("max_jitter_ms");
        }
        if self.max_packet_drop.is_some_and(|x| !(0.0..=1.0).contains(&x)) {
            out.push("max_packet_drop");
        }
        out
    }
}

/// QoS of a network path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkQos {
    pub latency_ms: f64,
    /// Unbounded (`f64::INFINITY`) between co-located endpoints; stored as `null`.
    #[serde(with = "unbounded")]
    pub bandwidth_bps: f64,
    pub jitter_ms: f64,
    pub packet_drop: f64,
}

impl NetworkQos {
    /// QoS between a node and itself.
    pub const LOCAL: NetworkQos = NetworkQos {
        latency_ms: 0.0,
        bandwidth_bps: f64::INFINITY,
        jitter_ms: 0.0,
        packet_drop: 0.0,
    };
}

mod unbounded {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_none()
        } else {
            s.serialize_some(v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// Geographic point on or above a spherical Earth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeoPoint {
    pub lat_deg: f64,
    pub lon_deg: f64,
    #[serde(default)]
    pub alt_km: f64,
}

impl GeoPoint {
    pub fn new(lat_deg: f64, lon_deg: f64, alt_km: f64) -> Self {
        GeoPoint {
            lat_deg,
            lon_deg,
            alt_km,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkflowTask {
    pub id: TaskId,
    #[serde(default)]
    pub resources: ResourceSpec,
    /// Profiled or user supplied duration in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_duration_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_response_time_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preferred_location: Option<GeoPoint>,
    /// Name of the node this task is bound to; pinned tasks bypass the scheduler.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned_to: Option<String>,
}

impl WorkflowTask {
    pub fn new(id: impl Into<String>, resources: ResourceSpec) -> Self {
        WorkflowTask {
            id: TaskId::new(id),
            resources,
            expected_duration_s: None,
            max_response_time_s: None,
            preferred_location: None,
            pinned_to: None,
        }
    }

    /// Duration estimate: the expected duration, else the response-time SLO.
    pub fn estimated_duration_s(&self) -> Option<f64> {
        self.expected_duration_s.or(self.max_response_time_s)
    }
}

/// External data source (e.g. an EO satellite). Never scheduled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSourceNode {
    pub id: String,
    /// Name of the infrastructure node hosting the source.
    pub host: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkflowEdge {
    /// Task id or data-source id.
    pub from: String,
    pub to: TaskId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slo: Option<NetworkSlo>,
}

/// Origin of a workflow edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeSource<'a> {
    Task(&'a WorkflowTask),
    DataSource(&'a DataSourceNode),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WorkflowViolation {
    DuplicateId { id: String },
    Cycle { tasks: Vec<TaskId> },
    DanglingEdge { from: String, to: String },
    EdgeIntoDataSource { from: String, to: String },
    SloOutOfRange { from: String, to: String, field: String },
    ResourceOutOfRange { task: TaskId, field: String },
    UnknownPlacement { task: TaskId },
}

impl fmt::Display for WorkflowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkflowViolation::DuplicateId { id } => write!(f, "duplicate id `{id}`"),
            WorkflowViolation::Cycle { tasks } => {
                let names: Vec<_> = tasks.iter().map(|t| t.as_str()).collect();
                write!(f, "cycle through tasks [{}]", names.join(", "))
            }
            WorkflowViolation::DanglingEdge { from, to } => {
                write!(f, "edge {from} -> {to} references an unknown endpoint")
            }
            WorkflowViolation::EdgeIntoDataSource { from, to } => {
                write!(f, "edge {from} -> {to} targets a data source")
            }
            WorkflowViolation::SloOutOfRange { from, to, field } => {
                write!(f, "edge {from} -> {to}: slo field `{field}` out of range")
            }
            WorkflowViolation::ResourceOutOfRange { task, field } => {
                write!(f, "task {task}: resource field `{field}` out of range")
            }
            WorkflowViolation::UnknownPlacement { task } => {
                write!(f, "placement recorded for unknown task {task}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<WorkflowViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Serverless workflow plus the placements made so far.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkflowDag {
    #[serde(default)]
    pub tasks: Vec<WorkflowTask>,
    #[serde(default)]
    pub data_sources: Vec<DataSourceNode>,
    #[serde(default)]
    pub edges: Vec<WorkflowEdge>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub placements: BTreeMap<TaskId, NodeId>,
}

impl WorkflowDag {
    pub fn task(&self, id: &TaskId) -> Option<&WorkflowTask> {
        self.tasks.iter().find(|t| &t.id == id)
    }

    pub fn data_source(&self, id: &str) -> Option<&DataSourceNode> {
        self.data_sources.iter().find(|d| d.id == id)
    }

    pub fn source_of<'a>(&'a self, edge: &WorkflowEdge) -> Option<EdgeSource<'a>> {
        self.vertex(&edge.from)
    }

    /// Task or data source with the given id.
    pub fn vertex(&self, id: &str) -> Option<EdgeSource<'_>> {
        if let Some(t) = self.tasks.iter().find(|t| t.id.as_str() == id) {
            return Some(EdgeSource::Task(t));
        }
        self.data_source(id).map(EdgeSource::DataSource)
    }

    pub fn incoming<'a>(&'a self, task: &'a TaskId) -> impl Iterator<Item = &'a WorkflowEdge> + 'a {
        self.edges.iter().filter(move |e| &e.to == task)
    }

    /// Predecessor tasks in edge order (data sources excluded).
    pub fn task_predecessors<'a>(&'a self, task: &'a TaskId) -> impl Iterator<Item = &'a WorkflowTask> + 'a {
        self.incoming(task).filter_map(|e| match self.source_of(e) {
            Some(EdgeSource::Task(t)) => Some(t),
            _ => None,
        })
    }

    pub fn is_ready(&self, task: &TaskId) -> bool {
        self.task_predecessors(task)
            .all(|p| self.placements.contains_key(&p.id))
    }

    /// Tasks in a deterministic topological order (Kahn, ties by declaration
    /// order). Fails with the tasks left on a cycle.
    pub fn topological_order(&self) -> Result<Vec<TaskId>, Vec<TaskId>> {
        let index: HashMap<&str, usize> = self
            .tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id.as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.tasks.len()];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); self.tasks.len()];
        for e in &self.edges {
            if let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) {
                succ[a].push(b);
                indegree[b] += 1;
            }
        }
        let mut ready: BTreeSet<usize> = (0..self.tasks.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.tasks.len());
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &j in &succ[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        if order.len() == self.tasks.len() {
            Ok(order.into_iter().map(|i| self.tasks[i].id.clone()).collect())
        } else {
            let done: HashSet<usize> = order.into_iter().collect();
            Err((0..self.tasks.len())
                .filter(|i| !done.contains(i))
                .map(|i| self.tasks[i].id.clone())
                .collect())
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen = HashSet::new();
        for id in self
            .tasks
            .iter()
            .map(|t| t.id.as_str())
            .chain(self.data_sources.iter().map(|d| d.id.as_str()))
        {
            if !seen.insert(id) {
                violations.push(WorkflowViolation::DuplicateId { id: id.to_owned() });
            }
        }
        for t in &self.tasks {
            if !(0.0..=1.0).contains(&t.resources.min_battery_charge) {
                violations.push(WorkflowViolation::ResourceOutOfRange {
                    task: t.id.clone(),
                    field: "min_battery_charge".into(),
                });
            }
            for (field, v) in [
                ("expected_duration_s", t.expected_duration_s),
                ("max_response_time_s", t.max_response_time_s),
            ] {
                if v.is_some_and(|d| !(d > 0.0)) {
                    violations.push(WorkflowViolation::ResourceOutOfRange {
                        task: t.id.clone(),
                        field: field.into(),
                    });
                }
            }
        }
        for e in &self.edges {
            let target_is_task = self.task(&e.to).is_some();
            if !target_is_task && self.data_source(e.to.as_str()).is_some() {
                violations.push(WorkflowViolation::EdgeIntoDataSource {
                    from: e.from.clone(),
                    to: e.to.0.clone(),
                });
            } else if !target_is_task || self.source_of(e).is_none() {
                violations.push(WorkflowViolation::DanglingEdge {
                    from: e.from.clone(),
                    to: e.to.0.clone(),
                });
            }
            if let Some(slo) = &e.slo {
                for field in slo.range_violations() {
                    violations.push(WorkflowViolation::SloOutOfRange {
                        from: e.from.clone(),
                        to: e.to.0.clone(),
                        field: field.into(),
                    });
                }
            }
        }
        if let Err(tasks) = self.topological_order() {
            violations.push(WorkflowViolation::Cycle { tasks });
        }
        for task in self.placements.keys() {
            if self.task(task).is_none() {
                violations.push(WorkflowViolation::UnknownPlacement { task: task.clone() });
            }
        }
        ValidationReport { violations }
    }
}

/// Scores one eligible node received during a scheduling pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub node: NodeId,
    /// Highest latency among the node's incoming-SLO paths (0 without SLO edges).
    pub worst_latency_ms: f64,
    pub latency_score: f64,
    pub temperature_score: f64,
    pub aggregate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Committed,
    Failed { reason: String },
}

/// Result of scheduling one task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulingDecision {
    pub task: TaskId,
    pub scheduler: String,
    pub chosen: Option<NodeId>,
    pub candidate_count: usize,
    pub eligible_count: usize,
    /// Breakdown for eligible nodes, sorted best first. Empty for baselines.
    pub scores: Vec<ScoreBreakdown>,
    /// Commit attempts made in the final pipeline pass.
    pub commit_attempts: u32,
    /// Pipeline restarts after exhausting the commit attempts.
    pub restarts: u32,
    pub wall_time_ms: f64,
    pub outcome: Outcome,
}

impl SchedulingDecision {
    pub fn is_committed(&self) -> bool {
        matches!(self.outcome, Outcome::Committed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(ids: &[&str]) -> WorkflowDag {
        let tasks = ids
            .iter()
            .map(|id| WorkflowTask::new(*id, ResourceSpec::default()))
            .collect();
        let edges = ids
            .windows(2)
            .map(|w| WorkflowEdge {
                from: w[0].into(),
                to: w[1].into(),
                slo: None,
            })
            .collect();
        WorkflowDag {
            tasks,
            edges,
            ..Default::default()
        }
    }

    #[test]
    fn empty_dag_is_valid() {
        assert!(WorkflowDag::default().validate().is_ok());
    }

    #[test]
    fn two_cycle_reported() {
        let mut dag = chain(&["A", "B"]);
        dag.edges.push(WorkflowEdge {
            from: "B".into(),
            to: "A".into(),
            slo: None,
        });
        let report = dag.validate();
        assert_eq!(
            report.violations,
            vec![WorkflowViolation::Cycle {
                tasks: vec!["A".into(), "B".into()]
            }]
        );
    }

    #[test]
    fn dangling_and_data_source_targets() {
        let mut dag = chain(&["A", "B"]);
        dag.data_sources.push(DataSourceNode {
            id: "eo".into(),
            host: "eo-sat".into(),
        });
        dag.edges.push(WorkflowEdge {
            from: "A".into(),
            to: "eo".into(),
            slo: None,
        });
        dag.edges.push(WorkflowEdge {
            from: "ghost".into(),
            to: "B".into(),
            slo: None,
        });
        let v = dag.validate().violations;
        assert!(v.contains(&WorkflowViolation::EdgeIntoDataSource {
            from: "A".into(),
            to: "eo".into()
        }));
        assert!(v.contains(&WorkflowViolation::DanglingEdge {
            from: "ghost".into(),
            to: "B".into()
        }));
    }

    #[test]
    fn slo_range_checked() {
        let mut dag = chain(&["A", "B"]);
        dag.edges[0].slo = Some(NetworkSlo {
            max_packet_drop: Some(1.5),
            max_latency_ms: Some(-1.0),
            ..Default::default()
        });
        let fields: Vec<_> = dag
            .validate()
            .violations
            .into_iter()
            .filter_map(|v| match v {
                WorkflowViolation::SloOutOfRange { field, .. } => Some(field),
                _ => None,
            })
            .collect();
        assert_eq!(fields, vec!["max_latency_ms", "max_packet_drop"]);
    }

    #[test]
    fn slo_boundaries_are_strict() {
        let slo = NetworkSlo {
            max_latency_ms: Some(100.0),
            min_bandwidth_bps: Some(1e6),
            ..Default::default()
        };
        let mut q = NetworkQos {
            latency_ms: 100.0,
            bandwidth_bps: 1e6,
            jitter_ms: 50.0,
            packet_drop: 0.9,
        };
        assert_eq!(slo.first_breach(&q), None);
        q.latency_ms = 100.0001;
        assert_eq!(slo.first_breach(&q), Some(SloDimension::Latency));
        q.latency_ms = 1.0;
        q.bandwidth_bps = 999_999.0;
        assert_eq!(slo.first_breach(&q), Some(SloDimension::Bandwidth));
        assert_eq!(slo.check(None), Err(SloDimension::Disconnected));
        assert_eq!(NetworkSlo::default().check(Some(&q)), Ok(()));
    }

    #[test]
    fn resource_fit() {
        let node = NodeResources::new("x86_64", ResourceVector::new(2000, 1 << 30, 0, 0)).with_battery(0.4);
        assert!(node.satisfies(&ResourceSpec::default()));
        let mut four = ResourceSpec::new(ResourceVector::new(4000, 0, 0, 0));
        assert!(!node.satisfies(&four));
        four.amounts.cpu_millicores = 2000;
        assert!(node.satisfies(&four));
        four.min_battery_charge = 0.5;
        assert!(!node.satisfies(&four));
        four.min_battery_charge = 0.0;
        four.cpu_arch = Some("arm64".into());
        assert!(!node.satisfies(&four));
    }

    #[test]
    fn topological_order_follows_declaration_on_ties() {
        let mut dag = chain(&["A", "B", "C"]);
        dag.tasks.push(WorkflowTask::new("D", ResourceSpec::default()));
        assert_eq!(
            dag.topological_order().unwrap(),
            vec![TaskId::from("A"), "B".into(), "C".into(), "D".into()]
        );
    }

    #[test]
    fn local_qos_survives_json() {
        let text = serde_json::to_string(&NetworkQos::LOCAL).unwrap();
        assert!(text.contains("\"bandwidth_bps\":null"), "{text}");
        let back: NetworkQos = serde_json::from_str(&text).unwrap();
        assert_eq!(back, NetworkQos::LOCAL);
    }
}
