use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

fn buffer(capacity: usize, alpha: f64) -> ReplayBuffer<u32> {
    ReplayBuffer::new(PerConfig {
        capacity,
        alpha,
        ..PerConfig::default()
    })
    .unwrap()
}

#[test]
fn first_push_gets_unit_priority() {
    let mut b = buffer(4, 0.6);
    let i = b.push(7);
    assert_eq!(b.priority(i), Some(1.0));
    assert_eq!(b.total_mass(), 1.0);
}

#[test]
fn push_inherits_max_priority() {
    let mut b = buffer(8, 0.6);
    b.push(0);
    b.push(1);
    b.update_priorities(&[1], &[-3.0]).unwrap();
    let i = b.push(2);
    assert!((b.priority(i).unwrap() - (3.0 + 1e-6)).abs() < 1e-12);
}

#[test]
fn zero_td_keeps_a_floor() {
    let mut b = buffer(2, 0.6);
    b.push(0);
    b.update_priorities(&[0], &[0.0]).unwrap();
    assert_eq!(b.priority(0), Some(1e-6));
}

#[test]
fn eviction_keeps_capacity_and_recent_items() {
    let mut b = buffer(3, 0.6);
    for k in 0..4 {
        b.push(k);
    }
    assert_eq!(b.len(), 3);
    assert_eq!(b.iter().copied().collect::<Vec<_>>(), vec![1, 2, 3]);
}

#[test]
fn sampling_needs_enough_items() {
    let mut b = buffer(4, 0.6);
    b.push(0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(
        b.sample(2, 0.4, &mut rng).unwrap_err(),
        PerError::Insufficient { have: 1, need: 2 }
    );
    assert!(b.sample(0, 0.4, &mut rng).is_err());
}

#[test]
fn bad_updates_are_rejected_atomically() {
    let mut b = buffer(4, 0.6);
    b.push(0);
    b.push(1);
    assert_eq!(
        b.update_priorities(&[0, 5], &[1.0, 1.0]),
        Err(PerError::BadIndex(5))
    );
    assert!(matches!(
        b.update_priorities(&[0, 1], &[1.0, f64::NAN]),
        Err(PerError::NonFinite(_))
    ));
    assert!(b.update_priorities(&[0], &[]).is_err());
    assert_eq!(b.priority(0), Some(1.0));
}

#[test]
fn uniform_priorities_give_unit_weights() {
    let mut b = buffer(16, 0.6);
    for k in 0..16 {
        b.push(k);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let batch = b.sample(8, 1.0, &mut rng).unwrap();
    assert!(batch.weights.iter().all(|&w| (w - 1.0).abs() < 1e-12));
}

#[test]
fn weights_follow_importance_formula() {
    // Two items with p = (1, 3), alpha = 1: P = (1/4, 3/4), N = 2.
    // w = (N P)^-beta = (0.5^-b, 1.5^-b); normalized by the batch max.
    let mut b = buffer(2, 1.0);
    b.push(0);
    b.push(1);
    b.update_priorities(&[0, 1], &[1.0 - 1e-6, 3.0 - 1e-6])
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let batch = b.sample(2, 0.5, &mut rng).unwrap();
    let raw = |i: usize| ([0.25f64, 0.75][i] * 2.0).powf(-0.5);
    let max = batch.indices.iter().map(|&i| raw(i)).fold(0.0, f64::max);
    for (&i, &w) in batch.indices.iter().zip(&batch.weights) {
        assert!((w - raw(i) / max).abs() < 1e-9);
    }
}

#[test]
fn alpha_zero_is_uniform() {
    let mut b = buffer(4, 0.0);
    for k in 0..4 {
        b.push(k);
    }
    b.update_priorities(&[0, 1, 2, 3], &[0.1, 5.0, 20.0, 1.0])
        .unwrap();
    for i in 0..4 {
        assert!((b.probability(i).unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn beta_anneals_linearly() {
    let cfg = PerConfig::default();
    assert_eq!(cfg.beta(0.0), 0.4);
    assert!((cfg.beta(0.5) - 0.7).abs() < 1e-12);
    assert_eq!(cfg.beta(1.0), 1.0);
    assert_eq!(cfg.beta(3.0), 1.0);
}

#[test]
fn config_validation() {
    assert!(PerConfig {
        capacity: 0,
        ..PerConfig::default()
    }
    .validate()
    .is_err());
    assert!(PerConfig {
        alpha: 1.5,
        ..PerConfig::default()
    }
    .validate()
    .is_err());
    assert!(PerConfig {
        eps: 0.0,
        ..PerConfig::default()
    }
    .validate()
    .is_err());
}

#[derive(Clone, Debug)]
enum Op {
    Push,
    Update(usize, f64),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    proptest::collection::vec(
        prop_oneof![
            Just(Op::Push),
            (0usize..64, -50.0f64..50.0).prop_map(|(i, d)| Op::Update(i, d))
        ],
        1..400,
    )
}

proptest! {
    #[test]
    fn root_tracks_leaf_sum(capacity in 1usize..40, alpha in 0.0f64..1.0, script in ops()) {
        let mut b = buffer(capacity, alpha);
        let mut pushed = 0u32;
        for op in script {
            match op {
                Op::Push => {
                    b.push(pushed);
                    pushed += 1;
                }
                Op::Update(i, d) if !b.is_empty() => {
                    b.update_priorities(&[i % b.len()], &[d]).unwrap();
                }
                Op::Update(..) => {}
            }
            let direct: f64 = (0..b.len()).map(|i| b.priority(i).unwrap().powf(alpha)).sum();
            prop_assert!((b.total_mass() - direct).abs() <= 1e-9 * direct.max(1.0));
            prop_assert!((0..b.len()).all(|i| b.priority(i).unwrap() > 0.0));
        }
        let expect: Vec<u32> = (pushed.saturating_sub(capacity as u32)..pushed).collect();
        prop_assert_eq!(b.iter().copied().collect::<Vec<_>>(), expect);
    }

    #[test]
    fn samples_land_on_populated_slots(seed in any::<u64>(), len in 1usize..20, k in 1usize..8) {
        prop_assume!(k <= len);
        let mut b = buffer(32, 0.6);
        for i in 0..len {
            b.push(i as u32);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tds: Vec<f64> = (0..len).map(|i| (i as f64 * 0.37).sin() * 4.0).collect();
        b.update_priorities(&(0..len).collect::<Vec<_>>(), &tds).unwrap();
        let batch = b.sample(k, 0.4, &mut rng).unwrap();
        prop_assert!(batch.indices.iter().all(|&i| i < len));
        prop_assert!(batch.weights.iter().all(|&w| w > 0.0 && w <= 1.0));
        prop_assert!(batch.weights.contains(&1.0));
    }
}
