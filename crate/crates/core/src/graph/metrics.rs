use super::{EdgeId, GraphError, MulticastTree, NliSnapshot, Topology};

/// Bottleneck bandwidth, additive delay and compound loss of one path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathMetrics {
    pub bw: f64,
    pub delay: f64,
    pub loss: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeMetrics {
    /// Mean over destinations of the source-to-destination bottleneck bandwidth.
    pub bw_tree: f64,
    /// Sum of delay over all tree edges.
    pub delay_tree: f64,
    /// `1 - prod(1 - loss)` over all tree edges.
    pub loss_tree: f64,
    pub length: usize,
}

/// Metrics of a simple path given as consecutive edges.
pub fn path_metrics(
    topo: &Topology,
    path: &[EdgeId],
    snap: &NliSnapshot,
) -> Result<PathMetrics, GraphError> {
    let start = path_start(topo, path)?;
    let nodes = topo.path_nodes(start, path)?;
    let mut seen = vec![false; topo.node_count()];
    for v in &nodes {
        if std::mem::replace(&mut seen[v.index()], true) {
            return Err(GraphError::NotAPath);
        }
    }
    let mut bw = f64::INFINITY;
    let mut delay = 0.0;
    let mut keep = 1.0;
    for &id in path {
        let l = snap.link(id)?;
        bw = bw.min(l.bw);
        delay += l.delay;
        keep *= 1.0 - l.loss;
    }
    Ok(PathMetrics {
        bw,
        delay,
        loss: 1.0 - keep,
    })
}

/// The endpoint of the first edge that is not shared with the second one.
fn path_start(topo: &Topology, path: &[EdgeId]) -> Result<super::NodeId, GraphError> {
    let first = *path.first().ok_or(GraphError::EmptyPath)?;
    for &id in path {
        if id.index() >= topo.edge_count() {
            return Err(GraphError::UnknownEdge(id));
        }
    }
    let e0 = topo.edge(first);
    match path.get(1) {
        None => Ok(e0.a),
        Some(&second) => {
            let e1 = topo.edge(second);
            if e1.touches(e0.b) {
                Ok(e0.a)
            } else if e1.touches(e0.a) {
                Ok(e0.b)
            } else {
                Err(GraphError::NotAPath)
            }
        }
    }
}

pub fn tree_metrics(
    topo: &Topology,
    tree: &MulticastTree,
    snap: &NliSnapshot,
) -> Result<TreeMetrics, GraphError> {
    let paths = tree.paths(topo)?;
    for &id in &tree.edges {
        snap.link(id)?;
    }
    let mut bw_sum = 0.0;
    for path in paths.values() {
        // A destination equal to the source contributes an empty path; it has no bottleneck.
        if path.is_empty() {
            return Err(GraphError::InvalidTree(
                "destination coincides with source".into(),
            ));
        }
        bw_sum += path_metrics(topo, path, snap)?.bw;
    }
    let mut delay = 0.0;
    let mut keep = 1.0;
    for &id in &tree.edges {
        let l = snap.link(id)?;
        delay += l.delay;
        keep *= 1.0 - l.loss;
    }
    Ok(TreeMetrics {
        bw_tree: bw_sum / paths.len() as f64,
        delay_tree: delay,
        loss_tree: 1.0 - keep,
        length: tree.edges.len(),
    })
}
