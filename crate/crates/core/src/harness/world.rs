//! Builds the simulated world for one (size, seed) pair: nodes, terrestrial
//! wiring, and the graph/thermal snapshots at every scheduling instant.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::scenario::{NodeTemplateConfig, ScenarioConfig, SizeRow};
use crate::constellation::{build_constellation, CircularOrbit, SimClock, TimeIndex};
use crate::error::ConfigError;
use crate::geo::{GeoPosition, EARTH_RADIUS_KM};
use crate::infra::{GridSlot, Infrastructure, NodeTemplate, PositionSource};
use crate::model::{GeoPoint, NodeId, NodeKind, NodeResources, ResourceVector, TaskId};
use crate::netgraph::{Link, LinkKind, NetworkGraph};
use crate::thermal::OrbitIllumination;
use crate::topology::{Topology, TopologyConfig};

/// Network and thermal state at one scheduling instant.
#[derive(Clone, Debug)]
pub struct Tick {
    pub time_index: TimeIndex,
    pub t_s: f64,
    pub graph: NetworkGraph,
    pub positions: Vec<GeoPosition>,
    /// Environmental temperature of every satellite with a thermal spec.
    pub environment_c: Vec<Option<f64>>,
}

pub struct World {
    pub size: SizeRow,
    pub seed: u64,
    pub infra: Arc<Infrastructure>,
    pub topology: Topology,
    pub clock: SimClock,
    pub start_s: f64,
    pub drone: NodeId,
    pub eo_source: NodeId,
    /// Seconds after the start at which each task is triggered.
    pub trigger_offsets: BTreeMap<TaskId, f64>,
    pub ticks: Vec<Tick>,
}

impl World {
    pub fn tick_at(&self, t_s: f64) -> &Tick {
        let idx = self.clock.index_at_or_after(t_s);
        self.ticks
            .iter()
            .find(|t| t.time_index == idx)
            .expect("tick precomputed for every trigger")
    }

    pub fn trigger_time(&self, task: &TaskId) -> f64 {
        self.start_s + self.trigger_offsets.get(task).copied().unwrap_or(0.0)
    }

    pub fn tick_for(&self, task: &TaskId) -> &Tick {
        self.tick_at(self.trigger_time(task))
    }
}

/// Independent, reproducible RNG stream for a purpose within one world.
pub fn stream(seed: u64, size: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((size as u64) << 8) | purpose);
    rng
}

/// Point reached by travelling `distance_km` along the surface at `bearing_rad`.
pub fn offset_point(origin: &GeoPoint, bearing_rad: f64, distance_km: f64) -> GeoPoint {
    let d = distance_km / EARTH_RADIUS_KM;
    let lat1 = origin.lat_deg.to_radians();
    let lon1 = origin.lon_deg.to_radians();
    let lat2 = (lat1.sin() * d.cos() + lat1.cos() * d.sin() * bearing_rad.cos()).asin();
    let lon2 = lon1 + (bearing_rad.sin() * d.sin() * lat1.cos()).atan2(d.cos() - lat1.sin() * lat2.sin());
    GeoPoint::new(lat2.to_degrees(), lon2.to_degrees(), 0.0)
}

fn scatter(rng: &mut ChaCha8Rng, origin: &GeoPoint, radius_km: f64) -> GeoPoint {
    let r = radius_km * rng.random::<f64>().sqrt();
    let bearing = rng.random::<f64>() * std::f64::consts::TAU;
    offset_point(origin, bearing, r)
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn resources(rng: &mut ChaCha8Rng, t: &NodeTemplateConfig) -> NodeResources {
    let mut r = NodeResources::new(t.cpu_arch.clone(), t.capacity);
    let load = uniform(rng, t.background_load);
    let busy = |v: u64| (v as f64 * load).round() as u64;
    r.free = ResourceVector {
        cpu_millicores: t.capacity.cpu_millicores - busy(t.capacity.cpu_millicores),
        memory_bytes: t.capacity.memory_bytes - busy(t.capacity.memory_bytes),
        ..t.capacity
    };
    if let Some(range) = t.battery_charge {
        r.battery_charge = Some(uniform(rng, range));
    }
    r
}

fn terrestrial_link(a: NodeId, b: NodeId, latency_ms: f64, cfg: &ScenarioConfig) -> Link {
    Link {
        a,
        b,
        kind: LinkKind::Terrestrial,
        latency_ms,
        bandwidth_bps: cfg.terrestrial.bandwidth_bps,
        jitter_ms: cfg.terrestrial.jitter_ms,
        packet_drop: cfg.terrestrial.packet_drop,
    }
}

fn nearest(from: &GeoPosition, pool: &[(NodeId, GeoPosition)], k: usize, skip: NodeId) -> Vec<NodeId> {
    let mut by_dist: Vec<(f64, NodeId)> = pool
        .iter()
        .filter(|(id, _)| *id != skip)
        .map(|(id, p)| (from.surface_distance_km(p), *id))
        .collect();
    by_dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    by_dist.into_iter().take(k).map(|(_, id)| id).collect()
}

/// Trigger offset of every task: a task starts once all its predecessor
/// tasks have run for their estimated duration.
pub fn trigger_offsets(cfg: &ScenarioConfig) -> Result<BTreeMap<TaskId, f64>, ConfigError> {
    let dag = &cfg.workflow;
    let order = dag
        .topological_order()
        .map_err(|cycle| ConfigError::invalid("workflow", format!("cycle through {cycle:?}")))?;
    let mut offsets: BTreeMap<TaskId, f64> = BTreeMap::new();
    for id in order {
        let start = dag
            .task_predecessors(&id)
            .map(|p| offsets.get(&p.id).copied().unwrap_or(0.0) + p.estimated_duration_s().unwrap_or(0.0))
            .fold(0.0, f64::max);
        offsets.insert(id, start);
    }
    Ok(offsets)
}

pub fn build_world(cfg: &ScenarioConfig, total: usize, seed: u64) -> Result<World, ConfigError> {
    let size = cfg.expand_size(total)?;
    let clock = SimClock { step_s: cfg.time_step_s };
    let mut timing = stream(seed, total, 0);
    let start_steps = (cfg.start_window_s / cfg.time_step_s).floor().max(1.0) as u64;
    let start_s = clock.seconds(timing.random_range(0..start_steps));

    let mut infra = Infrastructure::new();
    let mut load = stream(seed, total, 1);
    for sat in build_constellation(&cfg.constellation_for(&size))? {
        let mut t = NodeTemplate::new(
            format!("sat-{}-{}", sat.plane, sat.slot),
            NodeKind::Satellite,
            resources(&mut load, &cfg.templates.satellite),
            PositionSource::Orbit(sat.orbit),
        );
        t.grid = Some(GridSlot {
            plane: sat.plane,
            slot: sat.slot,
        });
        t.thermal = Some(cfg.templates.satellite.thermal.unwrap_or_default());
        infra.add(t);
    }

    let mut place = stream(seed, total, 2);
    let mut add_ground = |infra: &mut Infrastructure, kind, count, spread, tpl: &NodeTemplateConfig, prefix: &str| {
        (0..count)
            .map(|i| {
                let p = scatter(&mut place, &cfg.drone.location, spread);
                let pos = GeoPosition::from_geodetic(&p);
                let id = infra.add(NodeTemplate::new(
                    format!("{prefix}-{i}"),
                    kind,
                    resources(&mut load, tpl),
                    PositionSource::Fixed(pos),
                ));
                (id, pos)
            })
            .collect::<Vec<_>>()
    };
    let edges = add_ground(&mut infra, NodeKind::Edge, size.edges, cfg.terrestrial.edge_spread_km, &cfg.templates.edge, "edge");
    let clouds = add_ground(&mut infra, NodeKind::Cloud, size.clouds, cfg.terrestrial.cloud_spread_km, &cfg.templates.cloud, "cloud");

    let drone_pos = GeoPosition::from_geodetic(&cfg.drone.location);
    let mut drone_tpl = NodeTemplate::new(
        cfg.drone.name.clone(),
        NodeKind::GroundStation,
        NodeResources::new("arm64", ResourceVector::new(1000, 1 << 30, 0, 0)),
        PositionSource::Fixed(drone_pos),
    );
    drone_tpl.schedulable = false;
    let drone = infra.add(drone_tpl);

    let eo_orbit = CircularOrbit::through_subpoint(
        cfg.eo_source.altitude_km,
        cfg.eo_source.inclination_deg,
        &cfg.eo_source.pass_over,
        start_s,
    )?;
    let mut eo_tpl = NodeTemplate::new(
        cfg.eo_source.name.clone(),
        NodeKind::Satellite,
        NodeResources::new("arm64", ResourceVector::ZERO),
        PositionSource::Orbit(eo_orbit),
    );
    eo_tpl.schedulable = false;
    let eo_source = infra.add(eo_tpl);

    // Terrestrial wiring, deduplicated by node pair.
    let mut wire = stream(seed, total, 3);
    let t = &cfg.terrestrial;
    let mut links: BTreeMap<(NodeId, NodeId), Link> = BTreeMap::new();
    let mut connect = |a: NodeId, b: NodeId, lat: f64| {
        let key = (a.min(b), a.max(b));
        links.entry(key).or_insert_with(|| terrestrial_link(key.0, key.1, lat, cfg));
    };
    for (id, pos) in &edges {
        for n in nearest(pos, &edges, t.edge_neighbours, *id) {
            connect(*id, n, uniform(&mut wire, t.edge_edge_latency_ms));
        }
        for c in nearest(pos, &clouds, t.edge_cloud_links, *id) {
            connect(*id, c, uniform(&mut wire, t.edge_cloud_latency_ms));
        }
    }
    for (i, (a, _)) in clouds.iter().enumerate() {
        for (b, _) in &clouds[i + 1..] {
            connect(*a, *b, uniform(&mut wire, t.cloud_cloud_latency_ms));
        }
    }
    let mut access: Vec<NodeId> = edges
        .iter()
        .filter(|(_, p)| drone_pos.surface_distance_km(p) <= cfg.drone.access_radius_km)
        .map(|(id, _)| *id)
        .collect();
    if access.is_empty() {
        access = nearest(&drone_pos, &edges, 1, drone);
    }
    for e in access {
        connect(drone, e, uniform(&mut wire, t.access_latency_ms));
    }

    let topo_cfg = TopologyConfig {
        links: cfg.links,
        visibility: cfg.visibility,
    };
    let topology = Topology::new(&infra, links.into_values().collect(), topo_cfg);
    let infra = Arc::new(infra);

    let trigger_offsets = trigger_offsets(cfg)?;
    let mut indices: Vec<TimeIndex> = trigger_offsets
        .values()
        .map(|o| clock.index_at_or_after(start_s + o))
        .collect();
    indices.sort_unstable();
    indices.dedup();
    let ticks = indices
        .into_iter()
        .map(|ti| {
            let t_s = clock.seconds(ti);
            let environment_c = infra
                .nodes()
                .iter()
                .map(|n| {
                    let orbit = n.position.orbit()?;
                    n.thermal?;
                    let illum = OrbitIllumination {
                        orbit,
                        sun: &cfg.environment.sun,
                    };
                    Some(cfg.environment.environment_temp(&illum, t_s))
                })
                .collect();
            Tick {
                time_index: ti,
                t_s,
                graph: topology.snapshot(ti, &clock),
                positions: topology.positions_at(t_s),
                environment_c,
            }
        })
        .collect();

    Ok(World {
        size,
        seed,
        infra,
        topology,
        clock,
        start_s,
        drone,
        eo_source,
        trigger_offsets,
        ticks,
    })
}
