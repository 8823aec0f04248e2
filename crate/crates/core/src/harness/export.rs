//! Position and link-latency tables for offline inspection.

use std::path::Path;

use serde::Serialize;

use super::scenario::ScenarioConfig;
use super::world::build_world;
use crate::error::ConfigError;
use crate::model::NodeKind;

pub const POSITIONS_FILE: &str = "positions.csv";
pub const LATENCY_FILE: &str = "latency.csv";

#[derive(Serialize)]
struct PositionRow<'a> {
    node_id: u32,
    name: &'a str,
    kind: String,
    t: f64,
    x: f64,
    y: f64,
    z: f64,
    sunlit: Option<bool>,
}

#[derive(Serialize)]
struct LinkRow {
    t: f64,
    node_a: u32,
    node_b: u32,
    kind: String,
    latency_ms: f64,
    bandwidth_bps: f64,
}

fn csv_err(path: &Path, e: csv::Error) -> ConfigError {
    ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes node positions and every link of the graph at the given offsets
/// from the world's start time (the scheduling instants if `offsets_s` is empty).
/// Returns the number of (position, link) rows written.
pub fn export_traces(
    cfg: &ScenarioConfig,
    size: usize,
    seed: u64,
    offsets_s: &[f64],
    dir: &Path,
) -> Result<(usize, usize), ConfigError> {
    let world = build_world(cfg, size, seed)?;
    std::fs::create_dir_all(dir).map_err(|source| ConfigError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let times: Vec<u64> = if offsets_s.is_empty() {
        world.ticks.iter().map(|t| t.time_index).collect()
    } else {
        offsets_s
            .iter()
            .map(|o| world.clock.index_at_or_after(world.start_s + o))
            .collect()
    };

    let pos_path = dir.join(POSITIONS_FILE);
    let lat_path = dir.join(LATENCY_FILE);
    let mut pos = csv::Writer::from_path(&pos_path).map_err(|e| csv_err(&pos_path, e))?;
    let mut lat = csv::Writer::from_path(&lat_path).map_err(|e| csv_err(&lat_path, e))?;
    let (mut np, mut nl) = (0, 0);
    for ti in times {
        let t = world.clock.seconds(ti);
        let positions = world.topology.positions_at(t);
        for (node, p) in world.infra.nodes().iter().zip(&positions) {
            let sunlit = (node.kind == NodeKind::Satellite).then(|| cfg.environment.sun.is_sunlit(p, t));
            pos.serialize(PositionRow {
                node_id: node.id.0,
                name: &node.name,
                kind: node.kind.to_string(),
                t,
                x: p.x(),
                y: p.y(),
                z: p.z(),
                sunlit,
            })
            .map_err(|e| csv_err(&pos_path, e))?;
            np += 1;
        }
        let graph = world.topology.snapshot(ti, &world.clock);
        for l in graph.links() {
            lat.serialize(LinkRow {
                t,
                node_a: l.a.0,
                node_b: l.b.0,
                kind: format!("{:?}", l.kind).to_lowercase(),
                latency_ms: l.latency_ms,
                bandwidth_bps: l.bandwidth_bps,
            })
            .map_err(|e| csv_err(&lat_path, e))?;
            nl += 1;
        }
    }
    pos.flush().map_err(|source| ConfigError::Io { path: pos_path, source })?;
    lat.flush().map_err(|source| ConfigError::Io { path: lat_path, source })?;
    Ok((np, nl))
}
