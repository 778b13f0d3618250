//! Random Steiner instances and a brute-force optimum, shared by the
//! baseline tests and the acceptance suite.

use forkroute::graph::{EdgeId, NodeId, Topology};
use forkroute::steiner::EdgeWeights;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub topo: Topology,
    pub weights: EdgeWeights,
    pub source: NodeId,
    pub dests: Vec<NodeId>,
}

/// Random spanning tree plus extra edges, integer weights in 1..=20.
pub fn instance(seed: u64, n: usize, max_edges: usize, max_terminals: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: Vec<(u32, u32)> = (2..=n as u32)
        .map(|v| (rng.random_range(1..v), v))
        .collect();
    let max_edges = max_edges.min(n * (n - 1) / 2).max(raw.len());
    let target = rng.random_range(raw.len()..=max_edges);
    while raw.len() < target {
        let a = rng.random_range(1..=n as u32);
        let b = rng.random_range(1..=n as u32);
        let (a, b) = (a.min(b), a.max(b));
        if a != b && !raw.iter().any(|&(x, y)| (x.min(y), x.max(y)) == (a, b)) {
            raw.push((a, b));
        }
    }
    let topo = Topology::new(
        n,
        &raw.iter()
            .map(|&(a, b)| (a, b, 100.0, 1.0))
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let weights = EdgeWeights::new(
        &topo,
        (0..topo.edge_count())
            .map(|_| rng.random_range(1..=20) as f64)
            .collect(),
    )
    .unwrap();
    let mut nodes: Vec<NodeId> = topo.nodes().collect();
    nodes.shuffle(&mut rng);
    let k = rng.random_range(2..=max_terminals.min(n));
    Instance {
        topo,
        weights,
        source: nodes[0],
        dests: nodes[1..k].to_vec(),
    }
}

/// Cheapest acyclic edge subset joining every terminal.
pub fn enumerate_optimum(inst: &Instance) -> f64 {
    let m = inst.topo.edge_count();
    assert!(m <= 20);
    let terms: Vec<usize> = std::iter::once(inst.source)
        .chain(inst.dests.iter().copied())
        .map(|v| v.index())
        .collect();
    let mut best = f64::INFINITY;
    for subset in 0u32..(1 << m) {
        let mut parent: Vec<usize> = (0..inst.topo.node_count()).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        let mut cost = 0.0;
        let mut acyclic = true;
        for k in 0..m {
            if subset & (1 << k) != 0 {
                let e = inst.topo.edge(EdgeId(k as u32));
                let (ra, rb) = (
                    root(&mut parent, e.a.index()),
                    root(&mut parent, e.b.index()),
                );
                if ra == rb {
                    acyclic = false;
                    break;
                }
                parent[ra] = rb;
                cost += inst.weights.get(EdgeId(k as u32));
            }
        }
        if !acyclic || cost >= best {
            continue;
        }
        let r0 = root(&mut parent, terms[0]);
        if terms.iter().all(|&t| root(&mut parent, t) == r0) {
            best = cost;
        }
    }
    best
}
