//! Switch topology, link-state snapshots, multicast trees and their QoS metrics.

mod builtin;
mod metrics;
mod snapshot;
mod tree;

use std::collections::VecDeque;
use std::fmt;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use builtin::{bundled14, fork_example};
pub use metrics::{path_metrics, tree_metrics, PathMetrics, TreeMetrics};
pub use snapshot::{LinkState, NliSnapshot};
pub(crate) use tree::UnionFind;
pub use tree::{validate_tree, MulticastTree, TreeValidation};

/// Switch identifier. Ids are 1-based, matching topology files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    /// Zero-based position of this node in dense per-node arrays.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        NodeId(index as u32 + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of an undirected edge in [`Topology::edges`]. Edge ids follow the
/// lexicographic order of the canonical `(min, max)` endpoint pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Smaller endpoint.
    pub a: NodeId,
    /// Larger endpoint.
    pub b: NodeId,
    /// Mbit/s.
    pub capacity: f64,
    /// Milliseconds.
    pub base_delay: f64,
}

impl Edge {
    pub fn other(&self, node: NodeId) -> NodeId {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }

    pub fn touches(&self, node: NodeId) -> bool {
        self.a == node || self.b == node
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("topology must have at least two nodes, got {0}")]
    TooFewNodes(usize),
    #[error("node {node} outside 1..={n}")]
    NodeOutOfRange { node: u32, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("edge ({0}, {1}) has invalid capacity or delay")]
    InvalidEdgeAttribute(u32, u32),
    #[error("topology is disconnected: node {0} unreachable from node 1")]
    Disconnected(u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("no edge between {0} and {1}")]
    NoSuchEdge(NodeId, NodeId),
    #[error("edge {0:?} is not part of the topology")]
    UnknownEdge(EdgeId),
    #[error("path is empty")]
    EmptyPath,
    #[error("edges do not form a simple path")]
    NotAPath,
    #[error("invalid multicast tree: {0}")]
    InvalidTree(String),
    #[error("no link-state record for edge {0:?}")]
    MetricUnavailable(EdgeId),
    #[error("invalid snapshot: {0}")]
    InvalidSnapshot(String),
}

/// Undirected simple connected graph of switches.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    node_count: usize,
    edges: Vec<Edge>,
    /// Per node, `(neighbor, edge)` sorted by neighbor id.
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    /// Dense `n * n` lookup of the edge joining two nodes.
    lookup: Vec<Option<EdgeId>>,
    max_degree: usize,
}

impl Topology {
    /// Builds a topology from `(i, j, capacity, base_delay)` tuples with 1-based ids.
    pub fn new(node_count: usize, raw: &[(u32, u32, f64, f64)]) -> Result<Self, GraphError> {
        if node_count < 2 {
            return Err(GraphError::TooFewNodes(node_count));
        }
        let mut edges = Vec::with_capacity(raw.len());
        for &(i, j, capacity, base_delay) in raw {
            for node in [i, j] {
                if node == 0 || node as usize > node_count {
                    return Err(GraphError::NodeOutOfRange {
                        node,
                        n: node_count,
                    });
                }
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            if !(capacity.is_finite()
                && capacity > 0.0
                && base_delay.is_finite()
                && base_delay >= 0.0)
            {
                return Err(GraphError::InvalidEdgeAttribute(i, j));
            }
            edges.push(Edge {
                a: NodeId(i.min(j)),
                b: NodeId(i.max(j)),
                capacity,
                base_delay,
            });
        }
        edges.sort_by_key(|e| (e.a, e.b));
        for pair in edges.windows(2) {
            if pair[0].a == pair[1].a && pair[0].b == pair[1].b {
                return Err(GraphError::DuplicateEdge(pair[0].a.0, pair[0].b.0));
            }
        }

        let mut adjacency = vec![Vec::new(); node_count];
        let mut lookup = vec![None; node_count * node_count];
        for (k, e) in edges.iter().enumerate() {
            let id = EdgeId(k as u32);
            adjacency[e.a.index()].push((e.b, id));
            adjacency[e.b.index()].push((e.a, id));
            lookup[e.a.index() * node_count + e.b.index()] = Some(id);
            lookup[e.b.index() * node_count + e.a.index()] = Some(id);
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(v, _)| v);
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);

        let topo = Topology {
            node_count,
            edges,
            adjacency,
            lookup,
            max_degree,
        };
        if let Some(unreached) = topo.first_unreachable() {
            return Err(GraphError::Disconnected(unreached.0));
        }
        Ok(topo)
    }

    fn first_unreachable(&self) -> Option<NodeId> {
        let mut seen = vec![false; self.node_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    queue.push_back(v.index());
                }
            }
        }
        seen.iter().position(|s| !s).map(NodeId::from_index)
    }

    /// Parses the line-oriented topology format:
    ///
    /// ```text
    /// # comment
    /// nodes 4
    /// 1 2 100 5
    /// ```
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut node_count = None;
        let mut raw = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| GraphError::Parse {
                line: lineno + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] == "nodes" {
                if node_count.is_some() {
                    return Err(err("duplicate `nodes` header"));
                }
                if fields.len() != 2 {
                    return Err(err("expected `nodes <n>`"));
                }
                node_count = Some(
                    fields[1]
                        .parse::<usize>()
                        .map_err(|_| err("bad node count"))?,
                );
                continue;
            }
            if node_count.is_none() {
                return Err(err("edge before `nodes` header"));
            }
            if fields.len() != 4 {
                return Err(err("expected `i j capacity_mbps base_delay_ms`"));
            }
            let i = fields[0].parse::<u32>().map_err(|_| err("bad node id"))?;
            let j = fields[1].parse::<u32>().map_err(|_| err("bad node id"))?;
            let cap = fields[2].parse::<f64>().map_err(|_| err("bad capacity"))?;
            let delay = fields[3].parse::<f64>().map_err(|_| err("bad delay"))?;
            raw.push((i, j, cap, delay));
        }
        let n = node_count.ok_or(GraphError::Parse {
            line: 0,
            msg: "missing `nodes` header".into(),
        })?;
        Topology::new(n, &raw)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let text = fs::read_to_string(path.as_ref()).map_err(|e| GraphError::Io(e.to_string()))?;
        Topology::parse(&text)
    }

    /// Canonical text form; `parse(to_text())` reproduces the topology.
    pub fn to_text(&self) -> String {
        let mut out = format!("nodes {}\n", self.node_count);
        for e in &self.edges {
            out.push_str(&format!(
                "{} {} {} {}\n",
                e.a, e.b, e.capacity, e.base_delay
            ));
        }
        out
    }

    /// Short content hash of the canonical text form, used to tie snapshot
    /// files to the topology they were generated for.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.index()]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.node_count as u32).map(NodeId)
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.0 >= 1 && node.index() < self.node_count
    }

    /// Neighbors of `node` in ascending id order, paired with the joining edge.
    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[node.index()]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node.index()].len()
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        if !self.contains(u) || !self.contains(v) {
            return None;
        }
        self.lookup[u.index() * self.node_count + v.index()]
    }

    pub fn require_edge(&self, u: NodeId, v: NodeId) -> Result<EdgeId, GraphError> {
        self.edge_between(u, v).ok_or(GraphError::NoSuchEdge(u, v))
    }

    /// Node sequence of a path given as edges starting at `start`.
    pub fn path_nodes(&self, start: NodeId, path: &[EdgeId]) -> Result<Vec<NodeId>, GraphError> {
        let mut nodes = vec![start];
        let mut at = start;
        for &id in path {
            if id.index() >= self.edges.len() {
                return Err(GraphError::UnknownEdge(id));
            }
            let e = self.edge(id);
            if !e.touches(at) {
                return Err(GraphError::NotAPath);
            }
            at = e.other(at);
            nodes.push(at);
        }
        Ok(nodes)
    }
}
