use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::EdgeWeights;
use crate::graph::{EdgeId, NodeId, Topology};

/// Shortest-path forest from one or more zero-distance sources.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    /// Predecessor node and edge; `None` at sources and unreachable nodes.
    pub parent: Vec<Option<(NodeId, EdgeId)>>,
}

impl ShortestPaths {
    pub fn distance(&self, v: NodeId) -> f64 {
        self.dist[v.index()]
    }

    /// Edges from the nearest source to `v`, source end first.
    pub fn path_to(&self, v: NodeId) -> Vec<EdgeId> {
        let mut path = Vec::new();
        let mut at = v;
        while let Some((prev, id)) = self.parent[at.index()] {
            path.push(id);
            at = prev;
        }
        path.reverse();
        path
    }
}

#[derive(PartialEq)]
struct Entry(f64, NodeId);

impl Eq for Entry {}

impl Ord for Entry {
    // Min-heap on (distance, node id).
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from every node in `sources` at once. Only strict improvements
/// replace a predecessor, so ties keep the first path found in
/// (distance, node id) settle order.
pub fn dijkstra(topo: &Topology, weights: &EdgeWeights, sources: &[NodeId]) -> ShortestPaths {
    let n = topo.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s.index()] = 0.0;
        heap.push(Entry(0.0, s));
    }
    while let Some(Entry(d, u)) = heap.pop() {
        if std::mem::replace(&mut done[u.index()], true) {
            continue;
        }
        for &(v, id) in topo.neighbors(u) {
            let nd = d + weights.get(id);
            if !done[v.index()] && nd < dist[v.index()] {
                dist[v.index()] = nd;
                parent[v.index()] = Some((u, id));
                heap.push(Entry(nd, v));
            }
        }
    }
    ShortestPaths { dist, parent }
}
