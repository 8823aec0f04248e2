//! Builds time-indexed network graphs from the infrastructure: +grid ISLs
//! between constellation satellites, ground-to-satellite uplinks to the
//! nearest visible satellites and configured terrestrial links.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::constellation::{visible, SimClock, Site, TimeIndex, VisibilityConfig};
use crate::geo::GeoPosition;
use crate::infra::{GridSlot, Infrastructure, PositionSource};
use crate::model::{NodeId, NodeKind};
use crate::netgraph::{JitterPolicy, Link, LinkKind, NetworkGraph};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkDefaults {
    pub isl_bandwidth_bps: f64,
    pub ground_sat_bandwidth_bps: f64,
    pub isl_jitter_ms: f64,
    pub ground_sat_jitter_ms: f64,
    pub isl_packet_drop: f64,
    pub ground_sat_packet_drop: f64,
    /// Switching delay added to every ISL and ground-satellite hop.
    pub per_hop_overhead_ms: f64,
    /// Uplinks per ground node (K nearest visible satellites).
    pub ground_sat_links: usize,
    /// ISLs from satellites outside the +grid (e.g. EO satellites).
    pub free_flyer_links: usize,
    pub jitter_policy: JitterPolicy,
}

impl Default for LinkDefaults {
    fn default() -> Self {
        LinkDefaults {
            isl_bandwidth_bps: 20e9,
            ground_sat_bandwidth_bps: 5e9,
            isl_jitter_ms: 0.0,
            ground_sat_jitter_ms: 0.0,
            isl_packet_drop: 0.0,
            ground_sat_packet_drop: 0.0,
            per_hop_overhead_ms: 1.0,
            ground_sat_links: 1,
            free_flyer_links: 2,
            jitter_policy: JitterPolicy::Sum,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyConfig {
    pub links: LinkDefaults,
    pub visibility: VisibilityConfig,
}

#[derive(Clone, Debug)]
struct TopoNode {
    kind: NodeKind,
    position: PositionSource,
}

/// Time-independent part of the network; produces one graph per time index.
#[derive(Clone, Debug)]
pub struct Topology {
    nodes: Vec<TopoNode>,
    planes: u32,
    sats_per_plane: u32,
    grid: Vec<Option<NodeId>>,
    grid_members: Vec<NodeId>,
    free_flyers: Vec<NodeId>,
    ground: Vec<NodeId>,
    static_links: Vec<Link>,
    cfg: TopologyConfig,
}

impl Topology {
    /// `static_links` are terrestrial links with fixed QoS.
    pub fn new(infra: &Infrastructure, static_links: Vec<Link>, cfg: TopologyConfig) -> Self {
        let slots: Vec<(NodeId, GridSlot)> = infra
            .nodes()
            .iter()
            .filter_map(|n| n.grid.map(|g| (n.id, g)))
            .collect();
        let planes = slots.iter().map(|(_, g)| g.plane + 1).max().unwrap_or(0);
        let sats_per_plane = slots.iter().map(|(_, g)| g.slot + 1).max().unwrap_or(0);
        let mut grid = vec![None; planes as usize * sats_per_plane as usize];
        for (id, g) in &slots {
            grid[(g.plane * sats_per_plane + g.slot) as usize] = Some(*id);
        }
        let mut free_flyers = Vec::new();
        let mut ground = Vec::new();
        for n in infra.nodes() {
            if n.kind == NodeKind::Satellite {
                if n.grid.is_none() {
                    free_flyers.push(n.id);
                }
            } else {
                ground.push(n.id);
            }
        }
        Topology {
            nodes: infra
                .nodes()
                .iter()
                .map(|n| TopoNode {
                    kind: n.kind,
                    position: n.position,
                })
                .collect(),
            planes,
            sats_per_plane,
            grid,
            grid_members: slots.iter().map(|(id, _)| *id).collect(),
            free_flyers,
            ground,
            static_links,
            cfg,
        }
    }

    pub fn config(&self) -> &TopologyConfig {
        &self.cfg
    }

    pub fn static_links(&self) -> &[Link] {
        &self.static_links
    }

    pub fn positions_at(&self, t_s: f64) -> Vec<GeoPosition> {
        self.nodes.iter().map(|n| n.position.position_at(t_s)).collect()
    }

    fn slot_node(&self, plane: u32, slot: u32) -> Option<NodeId> {
        self.grid[(plane * self.sats_per_plane + slot) as usize]
    }

    fn radio_link(&self, a: NodeId, b: NodeId, kind: LinkKind, pos: &[GeoPosition]) -> Link {
        let l = &self.cfg.links;
        let (bandwidth_bps, jitter_ms, packet_drop) = match kind {
            LinkKind::GroundSat => (l.ground_sat_bandwidth_bps, l.ground_sat_jitter_ms, l.ground_sat_packet_drop),
            _ => (l.isl_bandwidth_bps, l.isl_jitter_ms, l.isl_packet_drop),
        };
        Link {
            a,
            b,
            kind,
            latency_ms: pos[a.index()].light_delay_ms(&pos[b.index()]) + l.per_hop_overhead_ms,
            bandwidth_bps,
            jitter_ms,
            packet_drop,
        }
    }

    /// Nearest `k` grid satellites visible from `from`, closest first.
    fn nearest_visible(&self, from: NodeId, k: usize, pos: &[GeoPosition]) -> Vec<NodeId> {
        if k == 0 {
            return Vec::new();
        }
        let here = pos[from.index()];
        let site = if self.nodes[from.index()].kind == NodeKind::Satellite {
            Site::Orbit(here)
        } else {
            Site::Ground(here)
        };
        let mut best: Vec<(f64, NodeId)> = Vec::with_capacity(k + 1);
        for &s in &self.grid_members {
            let p = pos[s.index()];
            let d = here.distance_km(&p);
            if best.len() == k && d >= best[k - 1].0 {
                continue;
            }
            if !visible(site, Site::Orbit(p), &self.cfg.visibility) {
                continue;
            }
            let at = best.partition_point(|(bd, bid)| (*bd, *bid) < (d, s));
            best.insert(at, (d, s));
            best.truncate(k);
        }
        best.into_iter().map(|(_, id)| id).collect()
    }

    /// Graph snapshot at time index `t`.
    pub fn snapshot(&self, t: TimeIndex, clock: &SimClock) -> NetworkGraph {
        let pos = self.positions_at(clock.seconds(t));
        let mut graph = NetworkGraph::new(self.nodes.len(), t).with_jitter_policy(self.cfg.links.jitter_policy);
        let mut seen = HashSet::new();
        let mut push = |graph: &mut NetworkGraph, link: Link| {
            let key = (link.a.min(link.b), link.a.max(link.b));
            if link.a != link.b && seen.insert(key) {
                graph.add_link(link).expect("topology node ids are dense");
            }
        };

        // +grid: next slot in the same plane and same slot in the next plane.
        for plane in 0..self.planes {
            for slot in 0..self.sats_per_plane {
                let Some(a) = self.slot_node(plane, slot) else { continue };
                let neighbours = [
                    self.slot_node(plane, (slot + 1) % self.sats_per_plane),
                    self.slot_node((plane + 1) % self.planes, slot),
                ];
                for b in neighbours.into_iter().flatten() {
                    let (pa, pb) = (pos[a.index()], pos[b.index()]);
                    if a != b && visible(Site::Orbit(pa), Site::Orbit(pb), &self.cfg.visibility) {
                        push(&mut graph, self.radio_link(a, b, LinkKind::Isl, &pos));
                    }
                }
            }
        }
        for &f in &self.free_flyers {
            for s in self.nearest_visible(f, self.cfg.links.free_flyer_links, &pos) {
                push(&mut graph, self.radio_link(f, s, LinkKind::Isl, &pos));
            }
        }
        for &g in &self.ground {
            for s in self.nearest_visible(g, self.cfg.links.ground_sat_links, &pos) {
                push(&mut graph, self.radio_link(g, s, LinkKind::GroundSat, &pos));
            }
        }
        for l in &self.static_links {
            push(&mut graph, *l);
        }
        graph
    }

    /// Recomputes positions, visibility and latencies for time index `t`.
    pub fn refresh(&self, _graph: &NetworkGraph, t: TimeIndex, clock: &SimClock) -> NetworkGraph {
        self.snapshot(t, clock)
    }
}

pub fn build_topology(
    infra: &Infrastructure,
    static_links: Vec<Link>,
    t: TimeIndex,
    clock: &SimClock,
    cfg: TopologyConfig,
) -> NetworkGraph {
    Topology::new(infra, static_links, cfg).snapshot(t, clock)
}
