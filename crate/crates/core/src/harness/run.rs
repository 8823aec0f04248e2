//! Runs the scheduler x size x seed matrix.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{ScenarioConfig, SchedulerKind};
use super::world::{build_world, World};
use crate::error::ConfigError;
use crate::model::{EdgeSource, NetworkQos, NetworkSlo, NodeId, NodeKind, Outcome, SchedulingDecision, SloDimension, TaskId, WorkflowDag};
use crate::orchestrator::Orchestrator;
use crate::scheduler::{FirstFit, HyperDrive, RandomScheduler, RoundRobin, Scheduler, SchedulingContext};
use crate::scheduler::filters::host_of;
use crate::thermal::{estimate_comp_temp_increase, score_node_temperature};

/// Achieved QoS of one workflow edge, measured when its target was placed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub from: String,
    pub to: TaskId,
    pub from_data_source: bool,
    /// Both endpoints have a host.
    pub placed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slo: Option<NetworkSlo>,
    /// `None` when an endpoint is unplaced or the hosts are disconnected.
    pub achieved: Option<NetworkQos>,
    pub latency_ms: Option<f64>,
    /// Breached SLO dimension; only set when both endpoints are placed.
    pub violation: Option<SloDimension>,
}

/// Temperature outlook of a task placed on a satellite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalRecord {
    pub task: TaskId,
    pub node: NodeId,
    pub predicted_c: f64,
    pub temp_rec_c: f64,
    pub temp_max_c: f64,
    /// Degrees above the recommended temperature, 0 if below.
    pub over_rec_c: f64,
}

impl ThermalRecord {
    pub fn exceeds_rec(&self) -> bool {
        self.predicted_c > self.temp_rec_c
    }

    pub fn exceeds_max(&self) -> bool {
        self.predicted_c > self.temp_max_c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub scheduler: SchedulerKind,
    pub size: usize,
    pub seed: u64,
    pub start_s: f64,
    /// Scheduled tasks in workflow order; pinned tasks are not included.
    pub decisions: Vec<SchedulingDecision>,
    pub placements: BTreeMap<TaskId, NodeId>,
    pub placement_kinds: BTreeMap<TaskId, NodeKind>,
    pub edges: Vec<EdgeRecord>,
    /// Longest source-to-sink path of achieved latencies; `None` if any
    /// edge latency is unknown.
    pub e2e_latency_ms: Option<f64>,
    /// Highest achieved latency over data-source edges.
    pub eo_latency_ms: Option<f64>,
    pub thermal: Vec<ThermalRecord>,
    pub complete: bool,
}

impl ExperimentRecord {
    pub fn slo_violations(&self) -> usize {
        self.edges.iter().filter(|e| e.violation.is_some()).count()
    }

    /// Copy with wall-clock timings zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for d in &mut r.decisions {
            d.wall_time_ms = 0.0;
        }
        r
    }
}

fn make_scheduler(kind: SchedulerKind, cfg: &ScenarioConfig, seed: u64) -> Box<dyn Scheduler> {
    match kind {
        SchedulerKind::Hyperdrive => Box::new(HyperDrive::new(cfg.hyperdrive.clone(), seed)),
        SchedulerKind::FirstFit => Box::new(FirstFit),
        SchedulerKind::RoundRobin => Box::new(RoundRobin::default()),
        SchedulerKind::Random => Box::new(RandomScheduler::new(seed)),
    }
}

fn failed(task: &TaskId, scheduler: &str, reason: String) -> SchedulingDecision {
    SchedulingDecision {
        task: task.clone(),
        scheduler: scheduler.to_owned(),
        chosen: None,
        candidate_count: 0,
        eligible_count: 0,
        scores: Vec::new(),
        commit_attempts: 0,
        restarts: 0,
        wall_time_ms: 0.0,
        outcome: Outcome::Failed { reason },
    }
}

/// Places the workflow with one scheduler in a prepared world.
pub fn run_cell(cfg: &ScenarioConfig, world: &World, kind: SchedulerKind) -> ExperimentRecord {
    let orch = Orchestrator::new(world.infra.clone());
    if cfg.conflict_probability > 0.0 {
        orch.inject_conflicts(cfg.conflict_probability, world.seed);
    }
    let mut scheduler = make_scheduler(kind, cfg, world.seed);
    let mut dag: WorkflowDag = cfg.workflow.clone();
    dag.placements.clear();
    let order = dag.topological_order().expect("validated workflow");

    let mut decisions = Vec::new();
    let mut thermal = Vec::new();
    let mut clock_at = f64::NEG_INFINITY;
    for task in &order {
        let tick = world.tick_for(task);
        if tick.t_s > clock_at {
            orch.advance_clock(tick.t_s, &tick.positions, |id| tick.environment_c[id.index()]);
            clock_at = tick.t_s;
        }
        let spec = dag.task(task).expect("task in order").clone();
        if spec.pinned_to.is_some() {
            // Pinned tasks bypass scheduling; a failure here leaves the task unplaced.
            let _ = crate::scheduler::place_pinned(task, &mut dag, &orch, scheduler.name());
            continue;
        }
        if let Some(p) = dag.task_predecessors(task).find(|p| !dag.placements.contains_key(&p.id)) {
            decisions.push(failed(task, scheduler.name(), format!("predecessor {} unplaced", p.id)));
            continue;
        }
        let ctx = SchedulingContext {
            graph: &tick.graph,
            time_s: tick.t_s,
            thermal: &cfg.environment,
        };
        let decision = match scheduler.schedule(task, &mut dag, &ctx, &orch) {
            Ok(d) => d,
            Err(e) => failed(task, scheduler.name(), e.to_string()),
        };
        if let Some(node) = decision.chosen {
            let snap = orch.snapshot(node).expect("committed node exists");
            if snap.kind() == NodeKind::Satellite {
                let view = snap.thermal_view();
                if let (Ok(est), Some(spec_t)) = (
                    score_node_temperature(&spec, &view, tick.t_s, &cfg.environment),
                    view.spec,
                ) {
                    let predicted = est.predicted_c.unwrap_or(f64::NAN);
                    thermal.push(ThermalRecord {
                        task: task.clone(),
                        node,
                        predicted_c: predicted,
                        temp_rec_c: spec_t.temp_rec_c,
                        temp_max_c: spec_t.temp_max_c,
                        over_rec_c: (predicted - spec_t.temp_rec_c).max(0.0),
                    });
                }
                if let (Some(spec_t), Some(d)) = (view.spec, spec.estimated_duration_s()) {
                    let a = spec.resources.amounts;
                    if let Ok(heat) = estimate_comp_temp_increase(spec_t, d, a.cpu_cores(), a.gpu_cores as f64) {
                        let _ = orch.record_heat(node, heat);
                    }
                }
            }
        }
        decisions.push(decision);
    }

    let edges = measure_edges(&dag, world);
    let e2e_latency_ms = critical_path(&dag, &order, &edges);
    let eo: Option<Vec<f64>> = edges.iter().filter(|e| e.from_data_source).map(|e| e.latency_ms).collect();
    let eo_latency_ms = eo.filter(|v| !v.is_empty()).map(|v| v.into_iter().fold(0.0, f64::max));
    let placement_kinds = dag
        .placements
        .iter()
        .map(|(t, n)| (t.clone(), world.infra.nodes()[n.index()].kind))
        .collect();
    ExperimentRecord {
        scheduler: kind,
        size: world.size.total,
        seed: world.seed,
        start_s: world.start_s,
        complete: dag.placements.len() == dag.tasks.len(),
        decisions,
        placements: dag.placements.clone(),
        placement_kinds,
        edges,
        e2e_latency_ms,
        eo_latency_ms,
        thermal,
    }
}

fn measure_edges(dag: &WorkflowDag, world: &World) -> Vec<EdgeRecord> {
    dag.edges
        .iter()
        .map(|e| {
            let from_data_source = matches!(dag.source_of(e), Some(EdgeSource::DataSource(_)));
            let src = host_of(&e.from, dag, &world.infra).ok().flatten();
            let dst = dag.placements.get(&e.to).copied();
            let achieved = match (src, dst) {
                (Some(a), Some(b)) if a == b => Some(NetworkQos::LOCAL),
                (Some(a), Some(b)) => world.tick_for(&e.to).graph.query_qos(a, b).ok().flatten(),
                _ => None,
            };
            let violation = match (src, dst, e.slo) {
                (Some(_), Some(_), Some(slo)) => slo.check(achieved.as_ref()).err(),
                _ => None,
            };
            EdgeRecord {
                from: e.from.clone(),
                to: e.to.clone(),
                from_data_source,
                placed: src.is_some() && dst.is_some(),
                slo: e.slo,
                latency_ms: achieved.map(|q| q.latency_ms),
                achieved,
                violation,
            }
        })
        .collect()
}

/// Longest path of achieved edge latencies from any source to any sink.
fn critical_path(dag: &WorkflowDag, order: &[TaskId], edges: &[EdgeRecord]) -> Option<f64> {
    let mut dist: BTreeMap<&TaskId, f64> = BTreeMap::new();
    let mut longest: f64 = 0.0;
    for task in order {
        let mut best: f64 = 0.0;
        for e in edges.iter().filter(|e| &e.to == task) {
            let upstream = match dag.vertex(&e.from) {
                Some(EdgeSource::Task(t)) => *dist.get(&t.id)?,
                _ => 0.0,
            };
            best = best.max(upstream + e.latency_ms?);
        }
        longest = longest.max(best);
        dist.insert(task, best);
    }
    Some(longest)
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; 0 uses rayon's default.
    pub parallel: usize,
}

/// Runs every (size, seed) world once per scheduler. Records are ordered by
/// size, seed and then the configured scheduler order.
pub fn run_experiment(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<Vec<ExperimentRecord>, ConfigError> {
    cfg.validate()?;
    let cells: Vec<(usize, u64)> = cfg
        .sizes
        .iter()
        .flat_map(|s| cfg.seeds.iter().map(move |seed| (*s, *seed)))
        .collect();
    let run = || -> Result<Vec<Vec<ExperimentRecord>>, ConfigError> {
        cells
            .par_iter()
            .map(|(size, seed)| {
                let world = build_world(cfg, *size, *seed)?;
                Ok(cfg.schedulers.iter().map(|k| run_cell(cfg, &world, *k)).collect())
            })
            .collect()
    };
    let nested = if opts.parallel > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallel)
            .build()
            .map_err(|e| ConfigError::invalid("parallel", e.to_string()))?
            .install(run)?
    } else {
        run()?
    };
    Ok(nested.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_path_takes_the_longest_branch() {
        let cfg = ScenarioConfig::wildfire();
        let dag = &cfg.workflow;
        let order = dag.topological_order().unwrap();
        let lat = |from: &str, to: &str, l: f64| EdgeRecord {
            from: from.into(),
            to: to.into(),
            from_data_source: from == "EO",
            placed: true,
            slo: None,
            achieved: None,
            latency_ms: Some(l),
            violation: None,
        };
        let edges = vec![
            lat("Ingest", "ExtractFrames", 5.0),
            lat("ExtractFrames", "ObjectDetection", 10.0),
            lat("EO", "ObjectDetection", 30.0),
            lat("ObjectDetection", "PrepareDataset", 2.0),
        ];
        assert_eq!(critical_path(dag, &order, &edges), Some(32.0));
        let mut broken = edges.clone();
        broken[3].latency_ms = None;
        assert_eq!(critical_path(dag, &order, &broken), None);
    }
}
