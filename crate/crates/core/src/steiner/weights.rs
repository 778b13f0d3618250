use super::SteinerError;
use crate::graph::{EdgeId, MulticastTree, NliSnapshot, Topology};

/// Offset that keeps bandwidth-derived weights strictly positive.
pub const BW_EPSILON: f64 = 1e-6;

/// How a snapshot's link state becomes one additive weight per edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weighting {
    /// `(max residual bw in snapshot - bw) + 1e-6`: prefers spare capacity.
    Bandwidth,
    /// Link delay in ms.
    Delay,
    /// `-ln(1 - loss)`, so path sums track compound loss exactly.
    Loss,
    /// `b1 (1 - bw) + b2 delay + b3 loss` over min-max normalized metrics.
    Scalarized([f64; 3]),
}

impl Weighting {
    pub const EVEN: Weighting = Weighting::Scalarized([1.0 / 3.0; 3]);

    pub fn name(self) -> &'static str {
        match self {
            Weighting::Bandwidth => "bw",
            Weighting::Delay => "delay",
            Weighting::Loss => "loss",
            Weighting::Scalarized(_) => "scalar",
        }
    }
}

/// Validated non-negative weight per edge, indexed by [`EdgeId`].
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeWeights(Vec<f64>);

impl EdgeWeights {
    pub fn new(topo: &Topology, weights: Vec<f64>) -> Result<Self, SteinerError> {
        if weights.len() != topo.edge_count() {
            return Err(SteinerError::WeightCount {
                expected: topo.edge_count(),
                got: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(SteinerError::InvalidWeight(w));
        }
        Ok(EdgeWeights(weights))
    }

    pub fn from_snapshot(
        topo: &Topology,
        snap: &NliSnapshot,
        weighting: Weighting,
    ) -> Result<Self, SteinerError> {
        let links = snap.links();
        if links.len() != topo.edge_count() {
            return Err(SteinerError::WeightCount {
                expected: topo.edge_count(),
                got: links.len(),
            });
        }
        let weights = match weighting {
            Weighting::Bandwidth => {
                let top = snap.max_bw();
                links.iter().map(|l| (top - l.bw) + BW_EPSILON).collect()
            }
            Weighting::Delay => links.iter().map(|l| l.delay).collect(),
            Weighting::Loss => links.iter().map(|l| -(-l.loss).ln_1p()).collect(),
            Weighting::Scalarized([b1, b2, b3]) => snap
                .normalized()
                .iter()
                .map(|l| b1 * (1.0 - l.bw) + b2 * l.delay + b3 * l.loss)
                .collect(),
        };
        EdgeWeights::new(topo, weights)
    }

    pub fn get(&self, id: EdgeId) -> f64 {
        self.0[id.index()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Sum of weights over the tree's edges.
    pub fn cost(&self, tree: &MulticastTree) -> f64 {
        tree.edges.iter().map(|&id| self.get(id)).sum()
    }

    pub fn scaled(&self, factor: f64) -> EdgeWeights {
        EdgeWeights(self.0.iter().map(|w| w * factor).collect())
    }
}
