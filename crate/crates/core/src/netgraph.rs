//! Undirected network graph for one time index, with
//! lowest-latency path queries and path QoS aggregation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::constellation::TimeIndex;
use crate::error::LookupError;
use crate::model::{NetworkQos, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Isl,
    GroundSat,
    Terrestrial,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub kind: LinkKind,
    pub latency_ms: f64,
    pub bandwidth_bps: f64,
    pub jitter_ms: f64,
    pub packet_drop: f64,
}

impl Link {
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }
}

/// How per-link jitter composes along a path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JitterPolicy {
    #[default]
    Sum,
    Max,
}

#[derive(Clone, Debug)]
pub struct NetworkGraph {
    time_index: TimeIndex,
    links: Vec<Link>,
    adjacency: Vec<Vec<(NodeId, u32)>>,
    jitter_policy: JitterPolicy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub qos: NetworkQos,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }
}

impl NetworkGraph {
    pub fn new(node_count: usize, time_index: TimeIndex) -> Self {
        NetworkGraph {
            time_index,
            links: Vec::new(),
            adjacency: vec![Vec::new(); node_count],
            jitter_policy: JitterPolicy::default(),
        }
    }

    pub fn with_jitter_policy(mut self, policy: JitterPolicy) -> Self {
        self.jitter_policy = policy;
        self
    }

    pub fn time_index(&self) -> TimeIndex {
        self.time_index
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn jitter_policy(&self) -> JitterPolicy {
        self.jitter_policy
    }

    fn check(&self, n: NodeId) -> Result<(), LookupError> {
        if n.index() < self.adjacency.len() {
            Ok(())
        } else {
            Err(LookupError::Node(n))
        }
    }

    /// Adds an undirected link. Self-loops are ignored.
    pub fn add_link(&mut self, link: Link) -> Result<(), LookupError> {
        self.check(link.a)?;
        self.check(link.b)?;
        if link.a == link.b {
            return Ok(());
        }
        debug_assert!(link.latency_ms >= 0.0, "negative link latency");
        let idx = self.links.len() as u32;
        self.adjacency[link.a.index()].push((link.b, idx));
        self.adjacency[link.b.index()].push((link.a, idx));
        self.links.push(link);
        Ok(())
    }

    pub fn neighbors(&self, n: NodeId) -> impl Iterator<Item = (NodeId, &Link)> + '_ {
        self.adjacency[n.index()]
            .iter()
            .map(move |&(m, l)| (m, &self.links[l as usize]))
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adjacency[n.index()].len()
    }

    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<&Link> {
        self.adjacency
            .get(a.index())?
            .iter()
            .find(|(m, _)| *m == b)
            .map(|&(_, l)| &self.links[l as usize])
    }

    /// Aggregates link QoS along a sequence of links taken in path order.
    pub fn aggregate<'a>(&self, links: impl IntoIterator<Item = &'a Link>) -> NetworkQos {
        let mut qos = NetworkQos::LOCAL;
        let mut delivered = 1.0;
        for l in links {
            qos.latency_ms += l.latency_ms;
            qos.bandwidth_bps = qos.bandwidth_bps.min(l.bandwidth_bps);
            qos.jitter_ms = match self.jitter_policy {
                JitterPolicy::Sum => qos.jitter_ms + l.jitter_ms,
                JitterPolicy::Max => qos.jitter_ms.max(l.jitter_ms),
            };
            delivered *= 1.0 - l.packet_drop;
        }
        qos.packet_drop = 1.0 - delivered;
        qos
    }

    /// Single-source lowest-latency tree. Ties on latency go to fewer hops,
    /// then to the lexicographically smallest node-id sequence.
    pub fn shortest_paths_from(&self, source: NodeId) -> Result<PathTree<'_>, LookupError> {
        self.check(source)?;
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut hops = vec![u32::MAX; n];
        let mut pred: Vec<Option<(NodeId, u32)>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[source.index()] = 0.0;
        hops[source.index()] = 0;
        heap.push(HeapEntry {
            latency: 0.0,
            hops: 0,
            node: source,
        });
        while let Some(HeapEntry { latency, hops: h, node }) = heap.pop() {
            let u = node.index();
            if done[u] || latency != dist[u] || h != hops[u] {
                continue;
            }
            done[u] = true;
            for &(v, li) in &self.adjacency[u] {
                let vi = v.index();
                if done[vi] {
                    continue;
                }
                let nd = latency + self.links[li as usize].latency_ms;
                let nh = h + 1;
                let better = match nd.total_cmp(&dist[vi]).then(nh.cmp(&hops[vi])) {
                    Ordering::Less => true,
                    Ordering::Greater => false,
                    Ordering::Equal => {
                        let cur = pred[vi].map(|(p, _)| p);
                        cur.is_some_and(|p| {
                            path_nodes(&pred, source, node) < path_nodes(&pred, source, p)
                        })
                    }
                };
                if better {
                    let changed_key = nd != dist[vi] || nh != hops[vi];
                    dist[vi] = nd;
                    hops[vi] = nh;
                    pred[vi] = Some((node, li));
                    if changed_key {
                        heap.push(HeapEntry {
                            latency: nd,
                            hops: nh,
                            node: v,
                        });
                    }
                }
            }
        }
        Ok(PathTree {
            graph: self,
            source,
            dist,
            pred,
        })
    }

    pub fn lowest_latency_path(&self, u: NodeId, v: NodeId) -> Result<Option<Path>, LookupError> {
        self.check(v)?;
        Ok(self.shortest_paths_from(u)?.path_to(v))
    }

    pub fn query_qos(&self, u: NodeId, v: NodeId) -> Result<Option<NetworkQos>, LookupError> {
        Ok(self.lowest_latency_path(u, v)?.map(|p| p.qos))
    }
}

fn path_nodes(pred: &[Option<(NodeId, u32)>], source: NodeId, to: NodeId) -> Vec<NodeId> {
    let mut seq = vec![to];
    let mut cur = to;
    while cur != source {
        match pred[cur.index()] {
            Some((p, _)) => {
                seq.push(p);
                cur = p;
            }
            None => break,
        }
    }
    seq.reverse();
    seq
}

#[derive(Debug)]
struct HeapEntry {
    latency: f64,
    hops: u32,
    node: NodeId,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    // Reversed for a min-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .latency
            .total_cmp(&self.latency)
            .then(other.hops.cmp(&self.hops))
            .then(other.node.cmp(&self.node))
    }
}

/// Result of a single-source query.
#[derive(Debug)]
pub struct PathTree<'g> {
    graph: &'g NetworkGraph,
    source: NodeId,
    dist: Vec<f64>,
    pred: Vec<Option<(NodeId, u32)>>,
}

impl PathTree<'_> {
    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn latency_to(&self, v: NodeId) -> Option<f64> {
        self.dist.get(v.index()).copied().filter(|d| d.is_finite())
    }

    pub fn path_to(&self, v: NodeId) -> Option<Path> {
        self.latency_to(v)?;
        let mut nodes = vec![v];
        let mut links = Vec::new();
        let mut cur = v;
        while cur != self.source {
            let (p, li) = self.pred[cur.index()]?;
            links.push(&self.graph.links[li as usize]);
            nodes.push(p);
            cur = p;
        }
        nodes.reverse();
        links.reverse();
        Some(Path {
            nodes,
            qos: self.graph.aggregate(links),
        })
    }

    pub fn qos_to(&self, v: NodeId) -> Option<NetworkQos> {
        self.path_to(v).map(|p| p.qos)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(a: u32, b: u32, ms: f64) -> Link {
        Link {
            a: NodeId(a),
            b: NodeId(b),
            kind: LinkKind::Terrestrial,
            latency_ms: ms,
            bandwidth_bps: 1e9,
            jitter_ms: 0.0,
            packet_drop: 0.0,
        }
    }

    fn graph(n: usize, links: &[Link]) -> NetworkGraph {
        let mut g = NetworkGraph::new(n, 0);
        for l in links {
            g.add_link(*l).unwrap();
        }
        g
    }

    #[test]
    fn direct_link() {
        let g = graph(2, &[link(0, 1, 5.0)]);
        let p = g.lowest_latency_path(NodeId(0), NodeId(1)).unwrap().unwrap();
        assert_eq!(p.qos.latency_ms, 5.0);
        assert_eq!(p.hops(), 1);
    }

    #[test]
    fn triangle_prefers_two_short_hops() {
        let g = graph(3, &[link(0, 1, 3.0), link(1, 2, 3.0), link(0, 2, 10.0)]);
        let p = g.lowest_latency_path(NodeId(0), NodeId(2)).unwrap().unwrap();
        assert_eq!(p.qos.latency_ms, 6.0);
        assert_eq!(p.nodes, vec![NodeId(0), NodeId(1), NodeId(2)]);
    }

    #[test]
    fn disconnected_is_absent() {
        let g = graph(4, &[link(0, 1, 1.0), link(2, 3, 1.0)]);
        assert_eq!(g.query_qos(NodeId(0), NodeId(3)).unwrap(), None);
        assert_eq!(
            g.query_qos(NodeId(0), NodeId(9)),
            Err(LookupError::Node(NodeId(9)))
        );
    }

    #[test]
    fn drop_compounds() {
        let mut a = link(0, 1, 1.0);
        a.packet_drop = 0.1;
        let mut b = link(1, 2, 1.0);
        b.packet_drop = 0.1;
        b.bandwidth_bps = 5e8;
        b.jitter_ms = 2.0;
        a.jitter_ms = 3.0;
        let g = graph(3, &[a, b]);
        let q = g.query_qos(NodeId(0), NodeId(2)).unwrap().unwrap();
        assert!((q.packet_drop - 0.19).abs() < 1e-12);
        assert_eq!(q.bandwidth_bps, 5e8);
        assert_eq!(q.jitter_ms, 5.0);
        let g = graph(3, &[a, b]).with_jitter_policy(JitterPolicy::Max);
        assert_eq!(g.query_qos(NodeId(0), NodeId(2)).unwrap().unwrap().jitter_ms, 3.0);
    }

    #[test]
    fn ties_prefer_fewer_hops_then_smaller_ids() {
        // 0-3 direct at 4 ms vs 0-1-3 at 2+2 ms: equal latency, direct wins.
        let g = graph(4, &[link(0, 3, 4.0), link(0, 1, 2.0), link(1, 3, 2.0)]);
        let p = g.lowest_latency_path(NodeId(0), NodeId(3)).unwrap().unwrap();
        assert_eq!(p.nodes, vec![NodeId(0), NodeId(3)]);
        // 0-2-3 and 0-1-3 tie on latency and hops: 0-1-3 is lexicographically smaller.
        let g = graph(4, &[link(0, 2, 2.0), link(2, 3, 2.0), link(0, 1, 2.0), link(1, 3, 2.0)]);
        let p = g.lowest_latency_path(NodeId(0), NodeId(3)).unwrap().unwrap();
        assert_eq!(p.nodes, vec![NodeId(0), NodeId(1), NodeId(3)]);
    }

    #[test]
    fn zero_latency_links_count_hops() {
        let g = graph(3, &[link(0, 1, 0.0), link(1, 2, 0.0), link(0, 2, 0.0)]);
        let p = g.lowest_latency_path(NodeId(0), NodeId(2)).unwrap().unwrap();
        assert_eq!(p.nodes, vec![NodeId(0), NodeId(2)]);
    }

    #[test]
    fn symmetric_latency() {
        let g = graph(4, &[link(0, 1, 3.0), link(1, 2, 4.0), link(2, 3, 1.0), link(0, 3, 9.0)]);
        for (u, v) in [(0, 2), (1, 3), (0, 3)] {
            let a = g.query_qos(NodeId(u), NodeId(v)).unwrap().unwrap().latency_ms;
            let b = g.query_qos(NodeId(v), NodeId(u)).unwrap().unwrap().latency_ms;
            assert_eq!(a, b);
        }
    }
}
