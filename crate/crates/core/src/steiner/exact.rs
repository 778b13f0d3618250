use std::collections::{BTreeSet, BinaryHeap};

use super::{finish, terminals, EdgeWeights, SteinerError};
use crate::graph::{EdgeId, MulticastTree, NodeId, Topology};

/// Largest terminal set (source included) the exact solver accepts.
pub const MAX_EXACT_TERMINALS: usize = 10;

#[derive(Clone, Copy)]
enum Back {
    None,
    /// Terminal sits at this node.
    Leaf,
    /// Two subtrees over complementary terminal subsets meet here.
    Merge(usize),
    /// Extend the same subset's tree at the neighbor by one edge.
    Edge(NodeId, EdgeId),
}

/// Minimum-weight Steiner tree by dynamic programming over terminal subsets
/// (Dreyfus–Wagner with a Dijkstra pass per subset). Exponential only in the
/// number of terminals.
pub fn exact_steiner(
    topo: &Topology,
    weights: &EdgeWeights,
    source: NodeId,
    destinations: &[NodeId],
) -> Result<MulticastTree, SteinerError> {
    let terms = terminals(topo, source, destinations)?;
    let k = terms.len();
    if k > MAX_EXACT_TERMINALS {
        return Err(SteinerError::TerminalBudget {
            terminals: k,
            max: MAX_EXACT_TERMINALS,
        });
    }
    let n = topo.node_count();
    let full = (1usize << k) - 1;
    let mut cost = vec![f64::INFINITY; (full + 1) * n];
    let mut back = vec![Back::None; (full + 1) * n];
    let at = |mask: usize, v: usize| mask * n + v;

    for mask in 1..=full {
        if mask.is_power_of_two() {
            let t = terms[mask.trailing_zeros() as usize].index();
            cost[at(mask, t)] = 0.0;
            back[at(mask, t)] = Back::Leaf;
        } else {
            // Submasks holding the lowest terminal, so each split is seen once.
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let part = sub | low;
                if part != mask {
                    for v in 0..n {
                        let c = cost[at(part, v)] + cost[at(mask ^ part, v)];
                        if c < cost[at(mask, v)] {
                            cost[at(mask, v)] = c;
                            back[at(mask, v)] = Back::Merge(part);
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        relax(
            topo,
            weights,
            &mut cost[at(mask, 0)..at(mask, 0) + n],
            &mut back[at(mask, 0)..at(mask, 0) + n],
        );
    }

    let root = source.index();
    if cost[at(full, root)].is_infinite() {
        let stranded = terms
            .iter()
            .enumerate()
            .find(|(i, _)| cost[at(1 << i, root)].is_infinite())
            .map_or(source, |(_, &t)| t);
        return Err(SteinerError::Unreachable(stranded));
    }

    let mut edges = BTreeSet::new();
    let mut stack = vec![(full, source)];
    while let Some((mask, v)) = stack.pop() {
        match back[at(mask, v.index())] {
            Back::None => unreachable!("finite cost always has a predecessor"),
            Back::Leaf => {}
            Back::Merge(part) => {
                stack.push((part, v));
                stack.push((mask ^ part, v));
            }
            Back::Edge(u, id) => {
                edges.insert(id);
                stack.push((mask, u));
            }
        }
    }
    Ok(finish(topo, weights, &terms, &edges))
}

/// Dijkstra seeded with every node's current cost for one terminal subset.
fn relax(topo: &Topology, weights: &EdgeWeights, cost: &mut [f64], back: &mut [Back]) {
    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
        }
    }
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut heap: BinaryHeap<Entry> = cost
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_finite())
        .map(|(v, &c)| Entry(c, v))
        .collect();
    let mut done = vec![false; cost.len()];
    while let Some(Entry(d, u)) = heap.pop() {
        if d > cost[u] || std::mem::replace(&mut done[u], true) {
            continue;
        }
        for &(v, id) in topo.neighbors(NodeId::from_index(u)) {
            let nd = d + weights.get(id);
            if !done[v.index()] && nd < cost[v.index()] {
                cost[v.index()] = nd;
                back[v.index()] = Back::Edge(NodeId::from_index(u), id);
                heap.push(Entry(nd, v.index()));
            }
        }
    }
}
