use std::collections::BTreeSet;

use super::{dijkstra, finish, terminals, EdgeWeights, SteinerError};
use crate::graph::{MulticastTree, NodeId, Topology};

/// Minimum path heuristic: grow from the source, each round attaching the
/// uncovered destination closest to the current tree by its shortest path.
pub fn mph(
    topo: &Topology,
    weights: &EdgeWeights,
    source: NodeId,
    destinations: &[NodeId],
) -> Result<MulticastTree, SteinerError> {
    let terms = terminals(topo, source, destinations)?;
    let mut tree_nodes = BTreeSet::from([source]);
    let mut edges = BTreeSet::new();
    let mut uncovered: BTreeSet<NodeId> = terms[1..].iter().copied().collect();
    while !uncovered.is_empty() {
        let seeds: Vec<NodeId> = tree_nodes.iter().copied().collect();
        let sp = dijkstra(topo, weights, &seeds);
        let next = uncovered
            .iter()
            .copied()
            .min_by(|a, b| sp.distance(*a).total_cmp(&sp.distance(*b)).then(a.cmp(b)))
            .expect("non-empty");
        if sp.distance(next).is_infinite() {
            return Err(SteinerError::Unreachable(next));
        }
        for id in sp.path_to(next) {
            let e = topo.edge(id);
            tree_nodes.insert(e.a);
            tree_nodes.insert(e.b);
            edges.insert(id);
        }
        uncovered.retain(|v| !tree_nodes.contains(v));
    }
    Ok(finish(topo, weights, &terms, &edges))
}
