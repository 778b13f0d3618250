use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::NliError;
use crate::graph::{NodeId, Topology};

/// Dense `n x n` demand matrix in Mbit/s with a zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficMatrix {
    n: usize,
    demand: Vec<f64>,
}

impl TrafficMatrix {
    pub fn zeros(n: usize) -> Self {
        TrafficMatrix {
            n,
            demand: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, from: NodeId, to: NodeId) -> f64 {
        self.demand[from.index() * self.n + to.index()]
    }

    pub fn total(&self) -> f64 {
        self.demand.iter().sum()
    }

    /// Non-zero `(from, to, demand)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.demand
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0.0)
            .map(move |(k, &d)| {
                (
                    NodeId::from_index(k / self.n),
                    NodeId::from_index(k % self.n),
                    d,
                )
            })
    }
}

/// Gravity model with explicit node weights:
/// `demand(i, j) = total * w_i * w_j / sum_{p != q} w_p * w_q`.
pub fn gravity_from_weights(weights: &[f64], total_mbps: f64) -> Result<TrafficMatrix, NliError> {
    if !(total_mbps.is_finite() && total_mbps > 0.0) {
        return Err(NliError::InvalidVolume(total_mbps));
    }
    let n = weights.len();
    let sum: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    let norm = sum * sum - sum_sq;
    let mut m = TrafficMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m.demand[i * n + j] = total_mbps * weights[i] * weights[j] / norm;
            }
        }
    }
    Ok(m)
}

/// Gravity-model traffic with node weights drawn uniformly from `[0.5, 1.5]`.
pub fn gravity_traffic(
    topo: &Topology,
    total_mbps: f64,
    seed: u64,
) -> Result<TrafficMatrix, NliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..topo.node_count())
        .map(|_| rng.random_range(0.5..1.5))
        .collect();
    gravity_from_weights(&weights, total_mbps)
}
