//! Instance generators and brute-force oracles shared by the integration
//! tests and the acceptance target.

#![allow(dead_code)]

use std::sync::Arc;

use hyperdrive::constellation::{CircularOrbit, SunModel};
use hyperdrive::geo::GeoPosition;
use hyperdrive::infra::{Infrastructure, NodeTemplate, PositionSource};
use hyperdrive::netgraph::{Link, LinkKind, NetworkGraph};
use hyperdrive::orchestrator::Orchestrator;
use hyperdrive::scheduler::{HyperDriveConfig, PerKind, VicinityConfig};
use hyperdrive::thermal::{score_node_temperature, ThermalEnvironment, ThermalSpec};
use hyperdrive::{
    DataSourceNode, GeoPoint, NetworkSlo, NodeId, NodeKind, NodeResources, ResourceSpec, ResourceVector, TaskId,
    WorkflowDag, WorkflowEdge, WorkflowTask,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GIB: u64 = 1 << 30;
pub const TARGET: &str = "target";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected-ish graph over `n` nodes with distinct latencies.
pub fn random_graph(r: &mut impl Rng, n: usize, density: f64) -> NetworkGraph {
    let mut g = NetworkGraph::new(n, 0);
    for a in 0..n {
        for b in a + 1..n {
            if r.random_bool(density) {
                g.add_link(Link {
                    a: NodeId(a as u32),
                    b: NodeId(b as u32),
                    kind: LinkKind::Terrestrial,
                    latency_ms: r.random_range(1.0..60.0),
                    bandwidth_bps: r.random_range(1e6..1e10),
                    jitter_ms: r.random_range(0.0..3.0),
                    packet_drop: r.random_range(0.0..0.05),
                })
                .unwrap();
            }
        }
    }
    g
}

/// Minimum latency over every simple path from `u` to `v` by depth-first enumeration.
pub fn exhaustive_min_latency(g: &NetworkGraph, u: NodeId, v: NodeId) -> Option<f64> {
    fn dfs(g: &NetworkGraph, at: NodeId, v: NodeId, seen: &mut Vec<bool>, acc: f64, best: &mut Option<f64>) {
        if at == v {
            *best = Some(best.map_or(acc, |b: f64| b.min(acc)));
            return;
        }
        for (m, l) in g.neighbors(at) {
            if !seen[m.index()] {
                seen[m.index()] = true;
                dfs(g, m, v, seen, acc + l.latency_ms, best);
                seen[m.index()] = false;
            }
        }
    }
    let mut seen = vec![false; g.node_count()];
    seen[u.index()] = true;
    let mut best = None;
    dfs(g, u, v, &mut seen, 0.0, &mut best);
    best
}

/// All-pairs lowest latency by Floyd-Warshall.
pub fn floyd_warshall(g: &NetworkGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for l in g.links() {
        let (a, b) = (l.a.index(), l.b.index());
        d[a][b] = d[a][b].min(l.latency_ms);
        d[b][a] = d[b][a].min(l.latency_ms);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// A single-task scheduling problem whose candidate set is every schedulable node.
pub struct Instance {
    pub infra: Arc<Infrastructure>,
    pub graph: NetworkGraph,
    pub dag: WorkflowDag,
    pub env: ThermalEnvironment,
    pub time_s: f64,
    /// Environment temperature per satellite applied on the first clock tick.
    pub env_temps: Vec<Option<f64>>,
}

impl Instance {
    pub fn target(&self) -> TaskId {
        TaskId::new(TARGET)
    }

    pub fn orchestrator(&self) -> Orchestrator {
        let orch = Orchestrator::new(self.infra.clone());
        let positions: Vec<GeoPosition> = self
            .infra
            .nodes()
            .iter()
            .map(|n| n.position.position_at(self.time_s))
            .collect();
        orch.advance_clock(self.time_s, &positions, |id| self.env_temps[id.index()]);
        orch
    }
}

/// Vicinity settings that admit every schedulable node.
pub fn exhaustive_config() -> HyperDriveConfig {
    let mut cfg = HyperDriveConfig::default();
    cfg.vicinity = VicinityConfig {
        radius_km: PerKind {
            cloud: 1e9,
            edge: 1e9,
            ground_station: 1e9,
            satellite: 1e9,
        },
        candidate_set_size: 1000,
        quotas: PerKind {
            cloud: 0.25,
            edge: 0.25,
            ground_station: 0.25,
            satellite: 0.25,
        },
    };
    cfg
}

fn near(r: &mut impl Rng) -> GeoPoint {
    GeoPoint::new(37.0 + r.random_range(-3.0..3.0), -120.0 + r.random_range(-3.0..3.0), 0.0)
}

/// Random instance with at most `max_nodes` nodes: terrestrial and orbiting
/// nodes with random free capacity, a random latency graph and a target
/// task fed by placed predecessors and possibly a data source.
pub fn random_instance(seed: u64, max_nodes: usize) -> Instance {
    let mut r = rng(seed);
    let n = r.random_range(3..=max_nodes);
    let sun = SunModel {
        initial_longitude_deg: r.random_range(-180.0..180.0),
        ..SunModel::default()
    };
    let env = ThermalEnvironment {
        sun,
        ..ThermalEnvironment::default()
    };
    let mut infra = Infrastructure::new();
    let mut env_temps = Vec::with_capacity(n);
    for i in 0..n {
        let kind = match r.random_range(0..10) {
            0..=3 => NodeKind::Edge,
            4..=5 => NodeKind::Cloud,
            6 => NodeKind::GroundStation,
            _ => NodeKind::Satellite,
        };
        let arch = if r.random_bool(0.7) { "x86_64" } else { "arm64" };
        let total = ResourceVector::new(
            r.random_range(1..=16) * 1000,
            r.random_range(1..=32) * GIB,
            r.random_range(0..=2),
            0,
        );
        let mut resources = NodeResources::new(arch, total);
        resources.free = ResourceVector::new(
            r.random_range(0..=total.cpu_millicores),
            r.random_range(0..=total.memory_bytes),
            r.random_range(0..=total.gpu_cores),
            0,
        );
        let position = if kind == NodeKind::Satellite {
            resources.battery_charge = Some(r.random_range(0.0..1.0));
            PositionSource::Orbit(
                CircularOrbit::through_subpoint(r.random_range(400.0..1200.0), r.random_range(45.0..98.0), &near(&mut r), 0.0)
                    .unwrap(),
            )
        } else {
            PositionSource::Fixed(GeoPosition::from_geodetic(&near(&mut r)))
        };
        let mut t = NodeTemplate::new(format!("n{i}"), kind, resources, position);
        if kind == NodeKind::Satellite {
            let rec = r.random_range(20.0..60.0);
            t.thermal = Some(ThermalSpec {
                temp_rec_c: rec,
                temp_max_c: rec + r.random_range(5.0..25.0),
                cpu_heat_rate: r.random_range(0.0..0.01),
                gpu_heat_rate: r.random_range(0.0..0.02),
                ..ThermalSpec::default()
            });
        }
        t.schedulable = kind != NodeKind::GroundStation;
        env_temps.push((kind == NodeKind::Satellite).then(|| r.random_range(-20.0..60.0)));
        infra.add(t);
    }
    let density = r.random_range(0.15..0.6);
    let graph = random_graph(&mut r, n, density);

    let mut demand = ResourceSpec::new(ResourceVector::new(
        r.random_range(0..=4) * 1000,
        r.random_range(0..=8) * GIB,
        r.random_range(0..=1),
        0,
    ));
    if r.random_bool(0.2) {
        demand.cpu_arch = Some("x86_64".into());
    }
    if r.random_bool(0.3) {
        demand.min_battery_charge = r.random_range(0.0..1.0);
    }
    let mut target = WorkflowTask::new(TARGET, demand);
    target.expected_duration_s = Some(r.random_range(10.0..1200.0));
    if r.random_bool(0.3) {
        target.preferred_location = Some(near(&mut r));
    }
    let mut dag = WorkflowDag::default();
    let preds = r.random_range(if target.preferred_location.is_some() { 0 } else { 1 }..=3);
    for p in 0..preds {
        let id = format!("p{p}");
        dag.tasks.push(WorkflowTask::new(id.as_str(), ResourceSpec::default()));
        dag.placements.insert(TaskId::new(id.as_str()), NodeId(r.random_range(0..n) as u32));
        dag.edges.push(WorkflowEdge {
            from: id,
            to: TaskId::new(TARGET),
            slo: Some(NetworkSlo::max_latency(r.random_range(10.0..150.0))),
        });
    }
    if r.random_bool(0.4) {
        dag.data_sources.push(DataSourceNode {
            id: "src".into(),
            host: format!("n{}", r.random_range(0..n)),
        });
        dag.edges.push(WorkflowEdge {
            from: "src".into(),
            to: TaskId::new(TARGET),
            slo: Some(NetworkSlo::max_latency(r.random_range(10.0..150.0))),
        });
    }
    dag.tasks.push(target);
    Instance {
        infra: Arc::new(infra),
        graph,
        dag,
        env,
        time_s: r.random_range(0.0..6000.0),
        env_temps,
    }
}

fn fits(demand: &ResourceSpec, res: &NodeResources) -> bool {
    let (d, f) = (&demand.amounts, &res.free);
    demand.cpu_arch.as_ref().is_none_or(|a| *a == res.cpu_arch)
        && res.battery_charge.is_none_or(|b| b >= demand.min_battery_charge)
        && d.cpu_millicores <= f.cpu_millicores
        && d.memory_bytes <= f.memory_bytes
        && d.gpu_cores <= f.gpu_cores
        && d.storage_bytes <= f.storage_bytes
}

/// Brute-force choice: every schedulable node passing both hard constraints,
/// scored on min-max normalised worst latency plus temperature, argmax with
/// ties to lower worst latency then lower id.
pub fn oracle_choice(inst: &Instance, orch: &Orchestrator) -> Option<NodeId> {
    let dist = floyd_warshall(&inst.graph);
    let target = inst.dag.task(&inst.target()).unwrap();
    let hosts: Vec<(usize, f64)> = inst
        .dag
        .edges
        .iter()
        .filter(|e| e.to == inst.target())
        .map(|e| {
            let host = match inst.dag.placements.get(&TaskId::new(e.from.as_str())) {
                Some(n) => n.index(),
                None => {
                    let ds = inst.dag.data_sources.iter().find(|d| d.id == e.from).unwrap();
                    inst.infra.by_name(&ds.host).unwrap().index()
                }
            };
            (host, e.slo.unwrap().max_latency_ms.unwrap())
        })
        .collect();

    let mut eligible: Vec<(NodeId, f64, f64)> = Vec::new();
    for rec in inst.infra.nodes() {
        if !rec.schedulable {
            continue;
        }
        let snap = orch.snapshot(rec.id).unwrap();
        if !fits(&target.resources, &snap.resources) {
            continue;
        }
        let i = rec.id.index();
        if hosts.iter().any(|&(h, max)| !(dist[h][i] <= max)) {
            continue;
        }
        let worst = hosts.iter().map(|&(h, _)| dist[h][i]).fold(0.0, f64::max);
        let temp = score_node_temperature(target, &snap.thermal_view(), inst.time_s, &inst.env).unwrap();
        eligible.push((rec.id, worst, temp.score as f64));
    }
    let lo = eligible.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let hi = eligible.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
    let score = |w: f64| if hi > lo { 100.0 * ((hi - w) / (hi - lo)) } else { 100.0 };
    eligible
        .into_iter()
        .map(|(id, w, t)| (id, w, score(w) + t))
        .min_by(|a, b| b.2.total_cmp(&a.2).then(a.1.total_cmp(&b.1)).then(a.0.cmp(&b.0)))
        .map(|e| e.0)
}

/// Ring of identical edge nodes around a point, for commit experiments.
pub fn edge_cluster(n: usize, cores: u64) -> Arc<Infrastructure> {
    let mut infra = Infrastructure::new();
    for i in 0..n {
        let angle = i as f64 / n as f64 * std::f64::consts::TAU;
        infra.add(NodeTemplate::new(
            format!("edge-{i}"),
            NodeKind::Edge,
            NodeResources::new("x86_64", ResourceVector::new(cores * 1000, cores * 2 * GIB, 0, 0)),
            PositionSource::Fixed(GeoPosition::from_geodetic(&GeoPoint::new(
                37.0 + 0.5 * angle.sin(),
                -120.0 + 0.5 * angle.cos(),
                0.0,
            ))),
        ));
    }
    Arc::new(infra)
}

pub fn node_totals(infra: &Infrastructure) -> impl Fn(NodeId) -> ResourceVector + '_ {
    move |id| infra.nodes()[id.index()].resources.total
}

/// Runs `threads` actors that commit and release random tasks against one
/// orchestrator, checking `free <= total` on every snapshot they take.
/// Returns the final commit statistics after a conservation audit.
pub fn stress_orchestrator(
    seed: u64,
    threads: usize,
    ops_per_thread: usize,
    conflict_probability: f64,
) -> Result<hyperdrive::orchestrator::CommitStats, String> {
    use hyperdrive::orchestrator::{CommitOutcome, CommitRequest};

    let infra = edge_cluster(12, 4);
    let orch = Orchestrator::new(infra.clone());
    if conflict_probability > 0.0 {
        orch.inject_conflicts(conflict_probability, seed);
    }
    let n = infra.len();
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let orch = &orch;
                s.spawn(move || -> Result<(), String> {
                    let mut r = rng(seed ^ ((t as u64 + 1) << 32));
                    let mut held: Vec<TaskId> = Vec::new();
                    for k in 0..ops_per_thread {
                        match r.random_range(0..10) {
                            0..=2 if !held.is_empty() => {
                                let task = held.swap_remove(r.random_range(0..held.len()));
                                orch.release(&task).map_err(|e| e.to_string())?;
                            }
                            3 if t == 0 => {
                                orch.release_adversary_claims();
                            }
                            _ => {
                                let task = TaskId::new(format!("a{t}/{k}"));
                                let req = CommitRequest {
                                    task: task.clone(),
                                    node: NodeId(r.random_range(0..n) as u32),
                                    resources: ResourceSpec::new(ResourceVector::new(
                                        r.random_range(1..=3) * 500,
                                        r.random_range(1..=4) * GIB / 2,
                                        0,
                                        0,
                                    )),
                                    scheduler: format!("actor-{t}"),
                                };
                                if orch.try_commit(&req).map_err(|e| e.to_string())? == CommitOutcome::Committed {
                                    held.push(task);
                                }
                            }
                        }
                        let snap = orch.snapshot(NodeId(r.random_range(0..n) as u32)).map_err(|e| e.to_string())?;
                        if !snap.resources.free.fits_within(&snap.resources.total) {
                            return Err(format!("{}: free exceeds total", snap.id()));
                        }
                    }
                    Ok(())
                })
            })
            .collect();
        handles
            .into_iter()
            .try_for_each(|h| h.join().map_err(|_| "actor panicked".to_string())?)
    })?;
    orch.audit(node_totals(&infra))?;
    Ok(orch.stats())
}

/// Schedules `tasks` independent tasks with HyperDrive under conflict
/// injection and counts rescheduling events: pipeline restarts plus tasks
/// abandoned after the last restart.
pub fn reschedule_events(commit_attempts: usize, seed: u64, probability: f64, tasks: usize) -> u64 {
    use hyperdrive::scheduler::{HyperDrive, Scheduler, SchedulingContext};

    let infra = edge_cluster(25, 8);
    let orch = Orchestrator::new(infra.clone());
    orch.inject_conflicts(probability, seed);
    let mut cfg = exhaustive_config();
    cfg.commit.attempts = commit_attempts;
    let mut hd = HyperDrive::new(cfg, seed);
    let graph = NetworkGraph::new(infra.len(), 0);
    let env = ThermalEnvironment::default();
    let ctx = SchedulingContext {
        graph: &graph,
        time_s: 0.0,
        thermal: &env,
    };
    let mut events = 0;
    for i in 0..tasks {
        let mut task = WorkflowTask::new(format!("t{i}"), ResourceSpec::new(ResourceVector::new(1000, GIB, 0, 0)));
        task.preferred_location = Some(GeoPoint::new(37.0, -120.0, 0.0));
        let id = task.id.clone();
        let mut dag = WorkflowDag {
            tasks: vec![task],
            ..WorkflowDag::default()
        };
        let d = hd.schedule(&id, &mut dag, &ctx, &orch).unwrap();
        events += d.restarts as u64 + u64::from(!d.is_committed());
        if d.is_committed() {
            orch.release(&id).unwrap();
        }
        orch.release_adversary_claims();
    }
    events
}
