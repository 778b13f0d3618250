use std::collections::BTreeSet;

use super::{dijkstra, finish, terminals, EdgeWeights, SteinerError};
use crate::graph::{MulticastTree, NodeId, Topology, UnionFind};

/// Kou–Markowsky–Berman: MST of the terminal distance graph, expanded into
/// shortest paths, re-spanned over the induced subgraph and pruned.
pub fn kmb(
    topo: &Topology,
    weights: &EdgeWeights,
    source: NodeId,
    destinations: &[NodeId],
) -> Result<MulticastTree, SteinerError> {
    let terms = terminals(topo, source, destinations)?;
    let trees: Vec<_> = terms
        .iter()
        .map(|&t| dijkstra(topo, weights, &[t]))
        .collect();

    let mut closure = Vec::new();
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let d = trees[i].distance(terms[j]);
            if d.is_infinite() {
                return Err(SteinerError::Unreachable(terms[j]));
            }
            closure.push((d, i, j));
        }
    }
    closure.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

    let mut uf = UnionFind::new(terms.len());
    let mut expanded = BTreeSet::new();
    for (_, i, j) in closure {
        if uf.union(i, j) {
            expanded.extend(trees[i].path_to(terms[j]));
        }
    }

    let mut nodes = BTreeSet::from([source]);
    for &id in &expanded {
        let e = topo.edge(id);
        nodes.insert(e.a);
        nodes.insert(e.b);
    }
    let induced = topo
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| nodes.contains(&e.a) && nodes.contains(&e.b))
        .map(|(k, _)| crate::graph::EdgeId(k as u32))
        .collect();
    Ok(finish(topo, weights, &terms, &induced))
}
