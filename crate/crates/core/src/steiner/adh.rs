use std::collections::BTreeSet;

use super::{dijkstra, finish, terminals, EdgeWeights, SteinerError};
use crate::graph::{MulticastTree, NodeId, Topology, UnionFind};

/// Average distance heuristic: starting from singleton terminal trees,
/// repeatedly find the node whose mean distance to its two nearest trees is
/// smallest and join both trees to it along shortest paths.
pub fn adh(
    topo: &Topology,
    weights: &EdgeWeights,
    source: NodeId,
    destinations: &[NodeId],
) -> Result<MulticastTree, SteinerError> {
    let terms = terminals(topo, source, destinations)?;
    let n = topo.node_count();
    let mut edges = BTreeSet::new();
    let mut uf = UnionFind::new(n);
    loop {
        let components = components(topo, &mut uf, &edges, &terms);
        if components.len() == 1 {
            break;
        }
        let trees: Vec<_> = components
            .iter()
            .map(|c| dijkstra(topo, weights, c))
            .collect();
        // (score, hub, nearer component, farther component)
        let mut best: Option<(f64, NodeId, usize, usize)> = None;
        for v in topo.nodes() {
            let mut near: Vec<(f64, usize)> = trees
                .iter()
                .enumerate()
                .map(|(k, t)| (t.distance(v), k))
                .collect();
            near.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            let score = (near[0].0 + near[1].0) / 2.0;
            if best.is_none_or(|(b, ..)| score < b) {
                best = Some((score, v, near[0].1, near[1].1));
            }
        }
        let (score, hub, ci, cj) = best.expect("graph has nodes");
        if score.is_infinite() {
            let stranded = components[cj].first().copied().unwrap_or(source);
            return Err(SteinerError::Unreachable(stranded));
        }
        for k in [ci, cj] {
            for id in trees[k].path_to(hub) {
                let e = topo.edge(id);
                uf.union(e.a.index(), e.b.index());
                edges.insert(id);
            }
        }
    }
    Ok(finish(topo, weights, &terms, &edges))
}

/// Node sets of the partial trees that hold at least one terminal, ordered
/// by their smallest terminal.
fn components(
    topo: &Topology,
    uf: &mut UnionFind,
    edges: &BTreeSet<crate::graph::EdgeId>,
    terms: &[NodeId],
) -> Vec<Vec<NodeId>> {
    let mut roots: Vec<usize> = Vec::new();
    let mut sets: Vec<BTreeSet<NodeId>> = Vec::new();
    let mut sorted = terms.to_vec();
    sorted.sort();
    for &t in &sorted {
        let r = uf.find(t.index());
        match roots.iter().position(|&x| x == r) {
            Some(k) => {
                sets[k].insert(t);
            }
            None => {
                roots.push(r);
                sets.push(BTreeSet::from([t]));
            }
        }
    }
    for &id in edges {
        let e = topo.edge(id);
        let r = uf.find(e.a.index());
        if let Some(k) = roots.iter().position(|&x| x == r) {
            sets[k].insert(e.a);
            sets[k].insert(e.b);
        }
    }
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}
