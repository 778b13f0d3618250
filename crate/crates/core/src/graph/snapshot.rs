use super::{EdgeId, GraphError, Topology};

/// Measured state of one undirected link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkState {
    /// Residual bandwidth, Mbit/s.
    pub bw: f64,
    /// Milliseconds.
    pub delay: f64,
    /// Packet loss rate in `[0, 1)`.
    pub loss: f64,
}

/// One timestamped set of per-link measurements, indexed by [`EdgeId`].
#[derive(Clone, Debug, PartialEq)]
pub struct NliSnapshot {
    pub id: u32,
    links: Vec<LinkState>,
}

impl NliSnapshot {
    pub fn new(topo: &Topology, id: u32, links: Vec<LinkState>) -> Result<Self, GraphError> {
        if links.len() != topo.edge_count() {
            return Err(GraphError::InvalidSnapshot(format!(
                "{} link records for {} edges",
                links.len(),
                topo.edge_count()
            )));
        }
        for (edge, l) in topo.edges().iter().zip(&links) {
            let ok = l.bw.is_finite()
                && l.bw >= 0.0
                && l.bw <= edge.capacity
                && l.delay.is_finite()
                && l.delay >= 0.0
                && (0.0..1.0).contains(&l.loss);
            if !ok {
                return Err(GraphError::InvalidSnapshot(format!(
                    "edge ({}, {}) out of range: {:?}",
                    edge.a, edge.b, l
                )));
            }
        }
        Ok(NliSnapshot { id, links })
    }

    /// Unloaded network: full capacity, base delay, no loss.
    pub fn idle(topo: &Topology, id: u32) -> Self {
        let links = topo
            .edges()
            .iter()
            .map(|e| LinkState {
                bw: e.capacity,
                delay: e.base_delay,
                loss: 0.0,
            })
            .collect();
        NliSnapshot { id, links }
    }

    pub fn link(&self, edge: EdgeId) -> Result<&LinkState, GraphError> {
        self.links
            .get(edge.index())
            .ok_or(GraphError::MetricUnavailable(edge))
    }

    pub fn links(&self) -> &[LinkState] {
        &self.links
    }

    pub fn max_bw(&self) -> f64 {
        self.links.iter().map(|l| l.bw).fold(0.0, f64::max)
    }

    /// Per-metric min-max scaling over this snapshot's links. A metric that
    /// is equal on every link maps to 0.5.
    pub fn normalized(&self) -> Vec<LinkState> {
        let bw = min_max(self.links.iter().map(|l| l.bw));
        let delay = min_max(self.links.iter().map(|l| l.delay));
        let loss = min_max(self.links.iter().map(|l| l.loss));
        self.links
            .iter()
            .map(|l| LinkState {
                bw: scale(l.bw, bw),
                delay: scale(l.delay, delay),
                loss: scale(l.loss, loss),
            })
            .collect()
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    })
}

fn scale(x: f64, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        (x - lo) / (hi - lo)
    } else {
        0.5
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Topology {
        Topology::new(
            3,
            &[(1, 2, 100.0, 1.0), (1, 3, 100.0, 1.0), (2, 3, 100.0, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn min_max_scaling() {
        let topo = triangle();
        let links = [10.0, 20.0, 30.0]
            .map(|bw| LinkState {
                bw,
                delay: 2.0,
                loss: 0.0,
            })
            .to_vec();
        let norm = NliSnapshot::new(&topo, 0, links).unwrap().normalized();
        let bw: Vec<f64> = norm.iter().map(|l| l.bw).collect();
        assert_eq!(bw, vec![0.0, 0.5, 1.0]);
        assert!(norm.iter().all(|l| l.delay == 0.5 && l.loss == 0.5));
    }

    #[test]
    fn rejects_out_of_range_records() {
        let topo = triangle();
        let over = vec![
            LinkState {
                bw: 101.0,
                delay: 0.0,
                loss: 0.0
            };
            3
        ];
        assert!(NliSnapshot::new(&topo, 0, over).is_err());
        let lossy = vec![
            LinkState {
                bw: 1.0,
                delay: 0.0,
                loss: 1.0
            };
            3
        ];
        assert!(NliSnapshot::new(&topo, 0, lossy).is_err());
        assert!(NliSnapshot::new(&topo, 0, vec![]).is_err());
    }
}
