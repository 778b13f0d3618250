//! Steiner-tree baselines over additive edge weights: the KMB, MPH and ADH
//! heuristics plus an exact dynamic program over terminal subsets.

mod adh;
mod exact;
mod kmb;
mod mph;
mod paths;
mod weights;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{EdgeId, GraphError, MulticastTree, NodeId, Topology};

pub use adh::adh;
pub use exact::{exact_steiner, MAX_EXACT_TERMINALS};
pub use kmb::kmb;
pub use mph::mph;
pub use paths::{dijkstra, ShortestPaths};
pub use weights::{EdgeWeights, Weighting};

#[derive(Debug, Error, PartialEq)]
pub enum SteinerError {
    #[error("terminal {0} is unreachable")]
    Unreachable(NodeId),
    #[error("destination set is empty")]
    NoDestinations,
    #[error("source {0} is also listed as a destination")]
    SourceIsDestination(NodeId),
    #[error("{terminals} terminals exceed the exact solver budget of {max}")]
    TerminalBudget { terminals: usize, max: usize },
    #[error("{got} edge weights for {expected} edges")]
    WeightCount { expected: usize, got: usize },
    #[error("edge weight {0} must be finite and non-negative")]
    InvalidWeight(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Baseline algorithms by name, in the order reports list them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Kmb,
    Mph,
    Adh,
    Exact,
}

impl Algorithm {
    pub fn run(
        self,
        topo: &Topology,
        weights: &EdgeWeights,
        source: NodeId,
        destinations: &[NodeId],
    ) -> Result<MulticastTree, SteinerError> {
        match self {
            Algorithm::Kmb => kmb(topo, weights, source, destinations),
            Algorithm::Mph => mph(topo, weights, source, destinations),
            Algorithm::Adh => adh(topo, weights, source, destinations),
            Algorithm::Exact => exact_steiner(topo, weights, source, destinations),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Kmb => "kmb",
            Algorithm::Mph => "mph",
            Algorithm::Adh => "adh",
            Algorithm::Exact => "exact",
        }
    }
}

/// Source first, then the distinct destinations ascending.
fn terminals(
    topo: &Topology,
    source: NodeId,
    destinations: &[NodeId],
) -> Result<Vec<NodeId>, SteinerError> {
    for &v in std::iter::once(&source).chain(destinations) {
        if !topo.contains(v) {
            return Err(GraphError::NodeOutOfRange {
                node: v.0,
                n: topo.node_count(),
            }
            .into());
        }
    }
    let dests: BTreeSet<NodeId> = destinations.iter().copied().collect();
    if dests.is_empty() {
        return Err(SteinerError::NoDestinations);
    }
    if dests.contains(&source) {
        return Err(SteinerError::SourceIsDestination(source));
    }
    Ok(std::iter::once(source).chain(dests).collect())
}

/// Minimum spanning forest of the given edges (Kruskal, ties by edge id).
fn spanning_tree(
    topo: &Topology,
    weights: &EdgeWeights,
    edges: &BTreeSet<EdgeId>,
) -> BTreeSet<EdgeId> {
    let mut order: Vec<EdgeId> = edges.iter().copied().collect();
    order.sort_by(|x, y| weights.get(*x).total_cmp(&weights.get(*y)).then(x.cmp(y)));
    let mut uf = crate::graph::UnionFind::new(topo.node_count());
    order
        .into_iter()
        .filter(|&id| {
            let e = topo.edge(id);
            uf.union(e.a.index(), e.b.index())
        })
        .collect()
}

/// Repeatedly strips leaves that are not terminals.
fn prune(topo: &Topology, edges: &mut BTreeSet<EdgeId>, terminals: &[NodeId]) {
    let mut degree = vec![0usize; topo.node_count()];
    for &id in edges.iter() {
        let e = topo.edge(id);
        degree[e.a.index()] += 1;
        degree[e.b.index()] += 1;
    }
    let keep: BTreeSet<NodeId> = terminals.iter().copied().collect();
    loop {
        let leaf_edge = edges.iter().copied().find(|&id| {
            let e = topo.edge(id);
            [e.a, e.b]
                .iter()
                .any(|v| degree[v.index()] == 1 && !keep.contains(v))
        });
        let Some(id) = leaf_edge else { break };
        let e = topo.edge(id);
        degree[e.a.index()] -= 1;
        degree[e.b.index()] -= 1;
        edges.remove(&id);
    }
}

fn finish(
    topo: &Topology,
    weights: &EdgeWeights,
    terminals: &[NodeId],
    edges: &BTreeSet<EdgeId>,
) -> MulticastTree {
    let mut tree_edges = spanning_tree(topo, weights, edges);
    prune(topo, &mut tree_edges, terminals);
    MulticastTree::new(terminals[0], terminals[1..].iter().copied(), tree_edges)
}

#[cfg(test)]
mod examples;
