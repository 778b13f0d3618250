//! Short training runs checked against brute-force optima.

use forkroute::agent::{train, EpsilonSchedule, Extraction, Task, TrainConfig};
use forkroute::graph::{bundled14, EdgeId, LinkState, NliSnapshot, NodeId, Topology};
use forkroute::nli::{generate_snapshots, SimConfig};

/// Discounted intrinsic return of walking `path` from the fork straight to
/// the destination: a small per-hop reward on intermediate hops and the full
/// path reward on arrival. Written out here independently of the environment.
fn path_return(norm: &[LinkState], path: &[EdgeId], gamma: f64) -> f64 {
    let third = 1.0 / 3.0;
    let score =
        |bw: f64, delay: f64, loss: f64| third * bw + third * (1.0 - delay) + third * (1.0 - loss);
    let mut ret = 0.0;
    for (t, id) in path[..path.len() - 1].iter().enumerate() {
        let l = norm[id.index()];
        ret += gamma.powi(t as i32) * 0.01 * score(l.bw, l.delay, l.loss);
    }
    let bottleneck = path
        .iter()
        .map(|id| norm[id.index()].bw)
        .fold(f64::INFINITY, f64::min);
    let delay: f64 = path.iter().map(|id| norm[id.index()].delay).sum();
    let keep: f64 = path.iter().map(|id| 1.0 - norm[id.index()].loss).product();
    ret + gamma.powi(path.len() as i32 - 1) * score(bottleneck, delay, 1.0 - keep)
}

/// Every simple path from `s` to `d` by depth-first enumeration.
fn simple_paths(topo: &Topology, s: NodeId, d: NodeId) -> Vec<Vec<EdgeId>> {
    fn go(
        topo: &Topology,
        at: NodeId,
        d: NodeId,
        seen: &mut Vec<bool>,
        path: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        if at == d {
            out.push(path.clone());
            return;
        }
        for &(v, id) in topo.neighbors(at) {
            if !seen[v.index()] {
                seen[v.index()] = true;
                path.push(id);
                go(topo, v, d, seen, path, out);
                path.pop();
                seen[v.index()] = false;
            }
        }
    }
    let mut seen = vec![false; topo.node_count()];
    seen[s.index()] = true;
    let mut out = Vec::new();
    go(topo, s, d, &mut seen, &mut Vec::new(), &mut out);
    out
}

fn ordered_path(topo: &Topology, tree_edges: &[EdgeId], s: NodeId, d: NodeId) -> Vec<EdgeId> {
    simple_paths(topo, s, d)
        .into_iter()
        .find(|p| p.len() == tree_edges.len() && p.iter().all(|e| tree_edges.contains(e)))
        .expect("tree is a path from s to d")
}

#[test]
fn single_destination_converges_to_best_path() {
    let topo = bundled14();
    let snap = generate_snapshots(&topo, 1, 0, &SimConfig::default())
        .unwrap()
        .remove(0);
    let norm = snap.normalized();
    let (s, d) = (NodeId(12), NodeId(2));
    let cfg = TrainConfig {
        episodes: 400,
        lr: 1e-3,
        conv_widths: vec![8, 16, 8],
        force_source_subgoal: true,
        intrinsic_epsilon: EpsilonSchedule {
            decay: 80.0,
            ..EpsilonSchedule::default()
        },
        seed: 0,
        ..TrainConfig::default()
    };
    let out = train(
        &cfg,
        &topo,
        std::slice::from_ref(&snap),
        &Task {
            source: s,
            destinations: vec![d],
        },
    )
    .unwrap();

    let best = simple_paths(&topo, s, d)
        .iter()
        .map(|p| path_return(&norm, p, cfg.gamma))
        .fold(f64::NEG_INFINITY, f64::max);
    let Extraction::Tree(tree) = &out.report.trees[0] else {
        panic!("extraction failed: {:?}", out.report.trees[0]);
    };
    let edges: Vec<EdgeId> = tree.edges.iter().copied().collect();
    let got = path_return(&norm, &ordered_path(&topo, &edges, s, d), cfg.gamma);
    assert!(
        got >= 0.95 * best,
        "greedy path return {got} vs optimum {best}"
    );
}

#[test]
fn illegal_subgoals_become_rarer() {
    let topo = bundled14();
    let snaps: Vec<NliSnapshot> = generate_snapshots(&topo, 1, 3, &SimConfig::default()).unwrap();
    for seed in 0..2 {
        let cfg = TrainConfig {
            episodes: 300,
            conv_widths: vec![4, 8, 4],
            meta_epsilon: EpsilonSchedule {
                decay: 60.0,
                ..EpsilonSchedule::default()
            },
            intrinsic_epsilon: EpsilonSchedule {
                decay: 60.0,
                ..EpsilonSchedule::default()
            },
            seed,
            lr: 1e-3,
            ..TrainConfig::default()
        };
        let out = train(&cfg, &topo, &snaps, &Task::new(12, &[2, 4, 11])).unwrap();
        let (early, late) = out.report.illegal_trend(0.1);
        assert!(
            late < early,
            "seed {seed}: illegal picks {early} early vs {late} late"
        );
    }
}
