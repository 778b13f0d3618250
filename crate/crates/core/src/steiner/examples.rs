use super::*;
use crate::graph::validate_tree;

const ALL: [Algorithm; 4] = [
    Algorithm::Kmb,
    Algorithm::Mph,
    Algorithm::Adh,
    Algorithm::Exact,
];

fn weighted(n: usize, edges: &[(u32, u32, f64)]) -> (Topology, EdgeWeights) {
    let raw: Vec<_> = edges.iter().map(|&(a, b, _)| (a, b, 100.0, 1.0)).collect();
    let topo = Topology::new(n, &raw).unwrap();
    // Topology sorts edges by endpoints; look weights up by pair.
    let w = topo
        .edges()
        .iter()
        .map(|e| {
            edges
                .iter()
                .find(|x| (x.0.min(x.1), x.0.max(x.1)) == (e.a.0, e.b.0))
                .unwrap()
                .2
        })
        .collect();
    let weights = EdgeWeights::new(&topo, w).unwrap();
    (topo, weights)
}

fn pairs(topo: &Topology, tree: &MulticastTree) -> Vec<(u32, u32)> {
    tree.edges
        .iter()
        .map(|&id| (topo.edge(id).a.0, topo.edge(id).b.0))
        .collect()
}

fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&x| NodeId(x)).collect()
}

/// Two routes from 1 to 5: 1-2-3-5 (cost 3) and 1-4-5 (cost 4), plus a
/// heavy shortcut 1-5.
fn diamond() -> (Topology, EdgeWeights) {
    weighted(
        5,
        &[
            (1, 2, 1.0),
            (2, 3, 1.0),
            (3, 5, 1.0),
            (1, 4, 2.0),
            (4, 5, 2.0),
            (1, 5, 9.0),
        ],
    )
}

#[test]
fn single_destination_is_shortest_path() {
    let (topo, w) = diamond();
    let best = dijkstra(&topo, &w, &[NodeId(1)]).distance(NodeId(5));
    assert_eq!(best, 3.0);
    for alg in ALL {
        let tree = alg.run(&topo, &w, NodeId(1), &ids(&[5])).unwrap();
        assert_eq!(w.cost(&tree), best, "{}", alg.name());
        assert_eq!(
            pairs(&topo, &tree),
            vec![(1, 2), (2, 3), (3, 5)],
            "{}",
            alg.name()
        );
    }
}

#[test]
fn star_terminals_use_spokes() {
    // Hub 1 with spokes to 2..=5; a heavier rim joins the spokes.
    let (topo, w) = weighted(
        5,
        &[
            (1, 2, 1.0),
            (1, 3, 1.0),
            (1, 4, 1.0),
            (1, 5, 1.0),
            (2, 3, 3.0),
            (3, 4, 3.0),
            (4, 5, 3.0),
        ],
    );
    for alg in ALL {
        let tree = alg.run(&topo, &w, NodeId(2), &ids(&[3, 4, 5])).unwrap();
        assert_eq!(
            pairs(&topo, &tree),
            vec![(1, 2), (1, 3), (1, 4), (1, 5)],
            "{}",
            alg.name()
        );
    }
}

#[test]
fn path_graph_terminals_give_the_path() {
    let (topo, w) = weighted(5, &[(1, 2, 1.0), (2, 3, 2.0), (3, 4, 1.0), (4, 5, 3.0)]);
    for alg in ALL {
        let tree = alg.run(&topo, &w, NodeId(2), &ids(&[5, 3])).unwrap();
        assert_eq!(
            pairs(&topo, &tree),
            vec![(2, 3), (3, 4), (4, 5)],
            "{}",
            alg.name()
        );
    }
}

#[test]
fn adh_finds_shared_hub() {
    // Terminals 1, 2, 3 each one hop from hub 4; direct terminal links cost 2.5.
    let (topo, w) = weighted(
        4,
        &[
            (1, 4, 1.0),
            (2, 4, 1.0),
            (3, 4, 1.0),
            (1, 2, 2.5),
            (2, 3, 2.5),
            (1, 3, 2.5),
        ],
    );
    let optimum = exact_steiner(&topo, &w, NodeId(1), &ids(&[2, 3])).unwrap();
    assert_eq!(w.cost(&optimum), 3.0);
    let tree = adh(&topo, &w, NodeId(1), &ids(&[2, 3])).unwrap();
    assert_eq!(w.cost(&tree), w.cost(&optimum));
    assert_eq!(pairs(&topo, &tree), vec![(1, 4), (2, 4), (3, 4)]);
}

#[test]
fn spanning_case_matches_minimum_spanning_tree() {
    let (topo, w) = weighted(
        6,
        &[
            (1, 2, 4.0),
            (1, 3, 1.0),
            (2, 3, 2.0),
            (2, 4, 5.0),
            (3, 4, 8.0),
            (3, 5, 10.0),
            (4, 5, 2.0),
            (4, 6, 6.0),
            (5, 6, 3.0),
        ],
    );
    // Kruskal by hand: 1-3 (1), 2-3 (2), 4-5 (2), 5-6 (3), 2-4 (5) = 13.
    let tree = exact_steiner(&topo, &w, NodeId(1), &ids(&[2, 3, 4, 5, 6])).unwrap();
    assert_eq!(w.cost(&tree), 13.0);
}

#[test]
fn heuristics_are_valid_and_never_beat_exact_on_bundled() {
    let topo = crate::graph::bundled14();
    let snap = crate::graph::NliSnapshot::idle(&topo, 0);
    for weighting in [
        Weighting::Bandwidth,
        Weighting::Delay,
        Weighting::Loss,
        Weighting::EVEN,
    ] {
        let w = EdgeWeights::from_snapshot(&topo, &snap, weighting).unwrap();
        let dests = ids(&[2, 4, 11]);
        let best = w.cost(&exact_steiner(&topo, &w, NodeId(12), &dests).unwrap());
        for alg in ALL {
            let tree = alg.run(&topo, &w, NodeId(12), &dests).unwrap();
            assert!(validate_tree(&topo, &tree).is_valid(), "{}", alg.name());
            assert!(w.cost(&tree) >= best - 1e-9);
        }
    }
}

#[test]
fn exact_rejects_large_terminal_sets() {
    let topo = crate::graph::bundled14();
    let w = EdgeWeights::new(&topo, vec![1.0; topo.edge_count()]).unwrap();
    let dests: Vec<NodeId> = (2..=11).map(NodeId).collect();
    assert_eq!(
        exact_steiner(&topo, &w, NodeId(1), &dests),
        Err(SteinerError::TerminalBudget {
            terminals: 11,
            max: MAX_EXACT_TERMINALS
        })
    );
}
