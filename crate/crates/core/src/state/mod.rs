//! Matrix encodings of the routing state fed to both controllers.
//!
//! Every channel is an `n x n` matrix over node pairs. Link channels carry
//! normalized metrics on edge entries; the tree channel marks selected edges
//! and the agent's position; the goal channel marks chosen fork nodes.

use crate::graph::{EdgeId, NliSnapshot, NodeId, Topology};

/// Mark added on both entries of an edge each time it is selected.
pub const TREE_EDGE_MARK: f64 = 1.0;
/// Diagonal mark of the node the agent currently stands on.
pub const POSITION_MARK: f64 = 0.5;
/// Diagonal mark added each time a node is chosen as fork node.
pub const FORK_MARK: f64 = 1.0;

pub const META_CHANNELS: usize = 4;
pub const INTRINSIC_CHANNELS: usize = 5;

/// Dense row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        self.data[i.index() * self.n + j.index()]
    }

    pub fn add(&mut self, i: NodeId, j: NodeId, value: f64) {
        self.data[i.index() * self.n + j.index()] += value;
    }

    fn add_symmetric(&mut self, i: NodeId, j: NodeId, value: f64) {
        self.add(i, j, value);
        self.add(j, i, value);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Normalized residual bandwidth, delay and loss channels.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkChannels {
    pub bw: Matrix,
    pub delay: Matrix,
    pub loss: Matrix,
}

pub fn encode_link_matrices(topo: &Topology, snap: &NliSnapshot) -> LinkChannels {
    let n = topo.node_count();
    let mut out = LinkChannels {
        bw: Matrix::zeros(n),
        delay: Matrix::zeros(n),
        loss: Matrix::zeros(n),
    };
    for (edge, l) in topo.edges().iter().zip(snap.normalized()) {
        out.bw.add_symmetric(edge.a, edge.b, l.bw);
        out.delay.add_symmetric(edge.a, edge.b, l.delay);
        out.loss.add_symmetric(edge.a, edge.b, l.loss);
    }
    out
}

/// Tree channel from per-edge selection counts plus the position mark.
pub fn encode_tree_state(topo: &Topology, edge_marks: &[u32], position: Option<NodeId>) -> Matrix {
    let mut m = Matrix::zeros(topo.node_count());
    for (k, &count) in edge_marks.iter().enumerate() {
        if count > 0 {
            let e = topo.edge(EdgeId(k as u32));
            m.add_symmetric(e.a, e.b, TREE_EDGE_MARK * count as f64);
        }
    }
    if let Some(v) = position {
        m.add(v, v, POSITION_MARK);
    }
    m
}

pub fn encode_goal_matrix(n: usize, forks: &[NodeId]) -> Matrix {
    let mut m = Matrix::zeros(n);
    for &f in forks {
        m.add(f, f, FORK_MARK);
    }
    m
}

/// `C` stacked `n x n` channels in a flat buffer, channel-major.
#[derive(Clone, Debug, PartialEq)]
pub struct StateTensor<const C: usize> {
    n: usize,
    data: Vec<f64>,
}

/// Tree, bandwidth, delay, loss.
pub type MetaState = StateTensor<META_CHANNELS>;
/// Tree, bandwidth, delay, loss, goal.
pub type IntrinsicState = StateTensor<INTRINSIC_CHANNELS>;

impl<const C: usize> StateTensor<C> {
    fn from_channels(channels: [&Matrix; C]) -> Self {
        let n = channels[0].size();
        let mut data = Vec::with_capacity(C * n * n);
        for m in channels {
            assert_eq!(m.size(), n, "channel size mismatch");
            data.extend_from_slice(m.as_slice());
        }
        StateTensor { n, data }
    }

    pub fn from_raw(n: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == C * n * n).then_some(StateTensor { n, data })
    }

    pub const CHANNELS: usize = C;

    pub fn size(&self) -> usize {
        self.n
    }

    /// `(channels, n, n)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (C, self.n, self.n)
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let len = self.n * self.n;
        &self.data[c * len..(c + 1) * len]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub fn stack_meta(tree: &Matrix, links: &LinkChannels) -> MetaState {
    StateTensor::from_channels([tree, &links.bw, &links.delay, &links.loss])
}

pub fn stack_intrinsic(tree: &Matrix, links: &LinkChannels, goal: &Matrix) -> IntrinsicState {
    StateTensor::from_channels([tree, &links.bw, &links.delay, &links.loss, goal])
}
