use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{EdgeId, GraphError, NodeId, Topology};

/// Edge set rooted at `source` that is meant to span every destination.
///
/// Construction does not enforce the tree invariants; [`validate_tree`]
/// reports them and the metric functions refuse invalid trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulticastTree {
    pub source: NodeId,
    pub destinations: BTreeSet<NodeId>,
    pub edges: BTreeSet<EdgeId>,
}

/// Outcome of [`validate_tree`]. Valid iff all four checks hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeValidation {
    pub acyclic: bool,
    pub connected: bool,
    pub covers_terminals: bool,
    /// Every leaf is the source or a destination.
    pub no_redundant_branches: bool,
    /// Degree-one tree nodes other than the source, ascending.
    pub leaves: Vec<NodeId>,
    pub redundant_leaves: Vec<NodeId>,
    pub missing_terminals: Vec<NodeId>,
}

impl TreeValidation {
    pub fn is_valid(&self) -> bool {
        self.acyclic && self.connected && self.covers_terminals && self.no_redundant_branches
    }

    fn failures(&self) -> String {
        let mut parts = Vec::new();
        if !self.acyclic {
            parts.push("cycle".to_string());
        }
        if !self.connected {
            parts.push("disconnected".to_string());
        }
        if !self.covers_terminals {
            parts.push(format!("missing terminals {:?}", self.missing_terminals));
        }
        if !self.no_redundant_branches {
            parts.push(format!("redundant leaves {:?}", self.redundant_leaves));
        }
        parts.join(", ")
    }
}

impl MulticastTree {
    pub fn new(
        source: NodeId,
        destinations: impl IntoIterator<Item = NodeId>,
        edges: impl IntoIterator<Item = EdgeId>,
    ) -> Self {
        MulticastTree {
            source,
            destinations: destinations.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    /// Convenience constructor from endpoint pairs.
    pub fn from_pairs(
        topo: &Topology,
        source: u32,
        destinations: &[u32],
        pairs: &[(u32, u32)],
    ) -> Result<Self, GraphError> {
        let edges = pairs
            .iter()
            .map(|&(i, j)| topo.require_edge(NodeId(i), NodeId(j)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MulticastTree::new(
            NodeId(source),
            destinations.iter().map(|&d| NodeId(d)),
            edges,
        ))
    }

    /// Source plus every edge endpoint, ascending.
    pub fn nodes(&self, topo: &Topology) -> BTreeSet<NodeId> {
        let mut nodes = BTreeSet::from([self.source]);
        for &id in &self.edges {
            if let Some(e) = topo.edges().get(id.index()) {
                nodes.insert(e.a);
                nodes.insert(e.b);
            }
        }
        nodes
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Unique source-to-destination edge path for every destination.
    pub fn paths(&self, topo: &Topology) -> Result<BTreeMap<NodeId, Vec<EdgeId>>, GraphError> {
        let report = validate_tree(topo, self);
        if !report.is_valid() {
            return Err(GraphError::InvalidTree(report.failures()));
        }
        let n = topo.node_count();
        let mut parent: Vec<Option<(NodeId, EdgeId)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[self.source.index()] = true;
        let mut queue = VecDeque::from([self.source]);
        while let Some(u) = queue.pop_front() {
            for &(v, id) in topo.neighbors(u) {
                if self.edges.contains(&id) && !seen[v.index()] {
                    seen[v.index()] = true;
                    parent[v.index()] = Some((u, id));
                    queue.push_back(v);
                }
            }
        }
        let mut paths = BTreeMap::new();
        for &d in &self.destinations {
            let mut path = Vec::new();
            let mut at = d;
            while let Some((p, id)) = parent[at.index()] {
                path.push(id);
                at = p;
            }
            path.reverse();
            paths.insert(d, path);
        }
        Ok(paths)
    }
}

/// Checks acyclicity, connectivity, terminal coverage and the absence of
/// non-terminal leaves.
pub fn validate_tree(topo: &Topology, tree: &MulticastTree) -> TreeValidation {
    let n = topo.node_count();
    let mut uf = UnionFind::new(n);
    let mut acyclic = true;
    let mut degree = vec![0usize; n];
    let mut known = true;
    for &id in &tree.edges {
        let Some(e) = topo.edges().get(id.index()) else {
            known = false;
            continue;
        };
        degree[e.a.index()] += 1;
        degree[e.b.index()] += 1;
        if !uf.union(e.a.index(), e.b.index()) {
            acyclic = false;
        }
    }
    let source_ok = topo.contains(tree.source);
    let nodes = tree.nodes(topo);
    let connected = known
        && source_ok
        && nodes
            .iter()
            .all(|v| topo.contains(*v) && uf.find(v.index()) == uf.find(tree.source.index()));

    let missing_terminals: Vec<NodeId> = tree
        .destinations
        .iter()
        .copied()
        .filter(|d| !nodes.contains(d))
        .collect();
    let covers_terminals =
        source_ok && !tree.destinations.is_empty() && missing_terminals.is_empty();

    let leaves: Vec<NodeId> = nodes
        .iter()
        .copied()
        .filter(|&v| v != tree.source && topo.contains(v) && degree[v.index()] == 1)
        .collect();
    let redundant_leaves: Vec<NodeId> = leaves
        .iter()
        .copied()
        .filter(|v| !tree.destinations.contains(v))
        .collect();
    TreeValidation {
        acyclic,
        connected,
        covers_terminals,
        no_redundant_branches: redundant_leaves.is_empty(),
        leaves,
        redundant_leaves,
        missing_terminals,
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
