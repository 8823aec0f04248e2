//! Builds the smallest wildfire world and queries lowest-latency paths from
//! the drone to nearby and distant nodes at the workflow's start.

use hyperdrive::harness::{build_world, ScenarioConfig};
use hyperdrive::NodeKind;

fn main() {
    let cfg = ScenarioConfig::wildfire();
    let world = build_world(&cfg, 1118, 1).expect("bundled scenario builds");
    let tick = world.tick_at(world.start_s);
    let g = &tick.graph;
    println!(
        "t={:.0}s: {} nodes, {} links, drone degree {}",
        tick.t_s,
        g.node_count(),
        g.links().len(),
        g.degree(world.drone)
    );

    let tree = g.shortest_paths_from(world.drone).expect("drone exists");
    let mut targets = Vec::new();
    for kind in [NodeKind::Edge, NodeKind::Cloud, NodeKind::Satellite] {
        // closest and farthest reachable node of each kind
        let mut reach: Vec<_> = world
            .infra
            .nodes()
            .iter()
            .filter(|n| n.kind == kind && n.schedulable)
            .filter_map(|n| tree.latency_to(n.id).map(|l| (l, n.id)))
            .collect();
        reach.sort_by(|a, b| a.0.total_cmp(&b.0));
        targets.extend(reach.first().copied());
        targets.extend(reach.last().copied());
    }
    for (_, id) in targets {
        let node = &world.infra.nodes()[id.index()];
        let path = tree.path_to(id).expect("reachable");
        println!(
            "{:<14} {:<10} {:>3} hops  latency {:>7.2} ms  bandwidth {:>6.1} Gbit/s  drop {:.4}",
            node.name,
            node.kind.to_string(),
            path.hops(),
            path.qos.latency_ms,
            path.qos.bandwidth_bps / 1e9,
            path.qos.packet_drop
        );
    }

    let eo = g.query_qos(world.eo_source, world.drone).expect("valid ids");
    match eo {
        Some(q) => println!("EO satellite -> drone: {:.2} ms", q.latency_ms),
        None => println!("EO satellite currently unreachable from the drone"),
    }
}
