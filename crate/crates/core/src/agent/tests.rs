use super::*;
use crate::graph::{bundled14, fork_example, validate_tree, NliSnapshot};
use crate::nli::{generate_snapshots, SimConfig};

fn small(episodes: usize, seed: u64) -> TrainConfig {
    TrainConfig {
        episodes,
        seed,
        batch: 8,
        conv_widths: vec![4, 4, 4],
        lr: 1e-3,
        ..TrainConfig::default()
    }
}

fn random_policies(topo: &crate::graph::Topology, seed: u64) -> Policies {
    let n = topo.node_count();
    Policies {
        intrinsic: ParameterSet::init(
            &NetworkSpec::intrinsic(n, topo.max_degree()).with_conv_widths(&[3, 3, 3]),
            seed,
        )
        .unwrap(),
        meta: ParameterSet::init(&NetworkSpec::meta(n).with_conv_widths(&[3, 3, 3]), seed + 1)
            .unwrap(),
    }
}

#[test]
fn untrained_extraction_is_valid_or_clean_failure() {
    let topo = bundled14();
    let snap = generate_snapshots(&topo, 1, 4, &SimConfig::default())
        .unwrap()
        .remove(0);
    let task = Task::new(12, &[2, 4, 11]);
    for seed in 0..30 {
        match extract_tree(&random_policies(&topo, seed), &topo, &snap, &task).unwrap() {
            Extraction::Tree(tree) => {
                let report = validate_tree(&topo, &tree);
                assert!(report.is_valid(), "{report:?}");
                assert!(report.leaves.iter().all(|v| task.destinations.contains(v)));
            }
            Extraction::Failed(f) => {
                assert!(f.steps <= 8 * topo.node_count());
                assert!(validate_tree(&topo, &f.partial).acyclic);
            }
        }
    }
}

#[test]
fn single_destination_extraction_is_a_path() {
    let topo = fork_example();
    let snap = NliSnapshot::idle(&topo, 0);
    let task = Task::new(1, &[7]);
    for seed in 0..20 {
        if let Extraction::Tree(tree) =
            extract_tree(&random_policies(&topo, seed), &topo, &snap, &task).unwrap()
        {
            let paths = tree.paths(&topo).unwrap();
            assert_eq!(paths[&NodeId(7)].len(), tree.len());
        }
    }
}

#[test]
fn mismatched_policies_are_rejected() {
    let topo = fork_example();
    let snap = NliSnapshot::idle(&topo, 0);
    let wrong = random_policies(&bundled14(), 0);
    assert!(extract_tree(&wrong, &topo, &snap, &Task::new(1, &[7])).is_err());
}

#[test]
fn training_is_deterministic() {
    let topo = fork_example();
    let snaps = generate_snapshots(&topo, 2, 1, &SimConfig::default()).unwrap();
    let task = Task::new(1, &[4, 6, 7]);
    let a = train(&small(12, 3), &topo, &snaps, &task).unwrap();
    let b = train(&small(12, 3), &topo, &snaps, &task).unwrap();
    assert_eq!(a.report.to_csv(), b.report.to_csv());
    assert_eq!(a.checkpoint.to_bytes(), b.checkpoint.to_bytes());
    let c = train(&small(12, 4), &topo, &snaps, &task).unwrap();
    assert_ne!(a.checkpoint.to_bytes(), c.checkpoint.to_bytes());
}

#[test]
fn report_shapes_follow_config() {
    let topo = fork_example();
    let snaps = generate_snapshots(&topo, 3, 1, &SimConfig::default()).unwrap();
    let out = train(&small(5, 0), &topo, &snaps, &Task::new(1, &[4, 6, 7])).unwrap();
    let r = &out.report;
    assert_eq!(r.episodes.len(), 5);
    assert_eq!(r.trees.len(), 3);
    assert_eq!(r.to_csv().lines().count(), 6);
    for rec in &r.episodes {
        assert_eq!(
            rec.subgoal_counts.iter().sum::<u32>() as usize,
            rec.subgoals
        );
        assert_eq!(rec.completed + rec.truncated, 3);
    }
    assert_eq!(r.episodes[0].eps_meta, 1.0);
    assert!(r.intrinsic_learn_steps > 0);
}

#[test]
fn forced_source_never_picks_another_fork() {
    let topo = fork_example();
    let snaps = vec![NliSnapshot::idle(&topo, 0)];
    let cfg = TrainConfig {
        force_source_subgoal: true,
        ..small(4, 1)
    };
    let out = train(&cfg, &topo, &snaps, &Task::new(1, &[7])).unwrap();
    for rec in &out.report.episodes {
        assert_eq!(rec.illegal_subgoals, 0);
        assert_eq!(rec.subgoal_counts[0] as usize, rec.subgoals);
    }
    assert_eq!(out.report.meta_learn_steps, 0);
}

#[test]
fn absurd_learning_rate_surfaces_divergence() {
    let topo = fork_example();
    let snaps = vec![NliSnapshot::idle(&topo, 0)];
    let cfg = TrainConfig {
        lr: 1e300,
        ..small(20, 0)
    };
    match train(&cfg, &topo, &snaps, &Task::new(1, &[4, 6, 7])) {
        Err(AgentError::Diverged {
            checkpoint, detail, ..
        }) => {
            assert!(!detail.is_empty());
            assert_eq!(checkpoint.task.source, NodeId(1));
        }
        other => panic!(
            "expected divergence, got {:?}",
            other.map(|o| o.report.summary())
        ),
    }
}

#[test]
fn empty_snapshot_list_is_rejected() {
    let topo = fork_example();
    assert!(matches!(
        train(&small(1, 0), &topo, &[], &Task::new(1, &[7])),
        Err(AgentError::InvalidConfig(_))
    ));
}
