use std::collections::VecDeque;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::measure::{link_delay, link_loss, residual_bandwidth, PortCounters};
use super::traffic::{gravity_traffic, TrafficMatrix};
use super::NliError;
use crate::graph::{EdgeId, LinkState, NliSnapshot, NodeId, Topology};

/// Knobs of the snapshot simulator.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Total offered demand per snapshot in Mbit/s, cycled over snapshots.
    pub volumes_mbps: Vec<f64>,
    /// Counter sampling interval in seconds.
    pub interval_s: f64,
    pub packet_bytes: u32,
    /// Loss rate of a lightly used link.
    pub loss_floor: f64,
    /// Extra loss per unit of utilization above `loss_knee`.
    pub loss_slope: f64,
    pub loss_knee: f64,
    /// Range of controller-to-switch echo round trips, ms.
    pub echo_ms: (f64, f64),
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            volumes_mbps: vec![
                60.0, 80.0, 100.0, 120.0, 140.0, 160.0, 180.0, 160.0, 140.0, 120.0, 100.0, 80.0,
            ],
            interval_s: 10.0,
            packet_bytes: 1500,
            loss_floor: 0.001,
            loss_slope: 0.05,
            loss_knee: 0.7,
            echo_ms: (0.5, 2.0),
        }
    }
}

impl SimConfig {
    /// No offered traffic at all.
    pub fn idle() -> Self {
        SimConfig {
            volumes_mbps: vec![0.0],
            ..SimConfig::default()
        }
    }

    fn validate(&self) -> Result<(), NliError> {
        let bad = |msg: &str| Err(NliError::InvalidConfig(msg.to_string()));
        if self.volumes_mbps.is_empty() {
            return bad("volumes_mbps is empty");
        }
        if self
            .volumes_mbps
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return bad("volumes must be finite and non-negative");
        }
        if !(self.interval_s.is_finite() && self.interval_s > 0.0) {
            return bad("interval_s must be positive");
        }
        if self.packet_bytes == 0 {
            return bad("packet_bytes must be positive");
        }
        if !(self.loss_floor >= 0.0
            && self.loss_slope >= 0.0
            && self.loss_floor + self.loss_slope < 1.0)
        {
            return bad("loss curve must stay below 1");
        }
        if !(0.0..=1.0).contains(&self.loss_knee) {
            return bad("loss_knee must lie in [0, 1]");
        }
        let (lo, hi) = self.echo_ms;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return bad("echo_ms must be an ordered non-negative range");
        }
        Ok(())
    }

    fn loss_rate(&self, utilization: f64) -> f64 {
        self.loss_floor + self.loss_slope * (utilization - self.loss_knee).max(0.0)
    }
}

/// Raw measurements behind one edge of one snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCounters {
    /// Port on the smaller-id endpoint, before and after the interval.
    pub a_before: PortCounters,
    pub a_after: PortCounters,
    /// Port on the larger-id endpoint.
    pub b_before: PortCounters,
    pub b_after: PortCounters,
    /// Demand routed over the edge before clamping to capacity, Mbit/s.
    pub offered_mbps: f64,
    pub lldp_ms: (f64, f64),
    pub echo_ms: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotTrace {
    pub traffic: TrafficMatrix,
    pub edges: Vec<EdgeCounters>,
}

/// Generates `count` snapshots; deterministic for a fixed seed.
pub fn generate_snapshots(
    topo: &Topology,
    count: usize,
    seed: u64,
    cfg: &SimConfig,
) -> Result<Vec<NliSnapshot>, NliError> {
    Ok(generate_with_trace(topo, count, seed, cfg)?
        .into_iter()
        .map(|(snap, _)| snap)
        .collect())
}

/// Like [`generate_snapshots`] but also returns the traffic matrix and
/// port counters each snapshot was derived from.
pub fn generate_with_trace(
    topo: &Topology,
    count: usize,
    seed: u64,
    cfg: &SimConfig,
) -> Result<Vec<(NliSnapshot, SnapshotTrace)>, NliError> {
    if count == 0 {
        return Err(NliError::NoSnapshots);
    }
    cfg.validate()?;
    let routes = MinHopRoutes::new(topo);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let m = topo.edge_count();
    // Cumulative counters per edge: (port a, port b).
    let mut ports = vec![(PortCounters::default(), PortCounters::default()); m];
    let mut out = Vec::with_capacity(count);

    for k in 0..count {
        let traffic_seed = master.next_u64();
        let mut echo_rng = ChaCha8Rng::seed_from_u64(master.next_u64());
        let volume = cfg.volumes_mbps[k % cfg.volumes_mbps.len()];
        let traffic = if volume > 0.0 {
            gravity_traffic(topo, volume, traffic_seed)?
        } else {
            TrafficMatrix::zeros(topo.node_count())
        };
        let echo: Vec<f64> = (0..topo.node_count())
            .map(|_| echo_rng.random_range(cfg.echo_ms.0..=cfg.echo_ms.1))
            .collect();

        // Directed load per edge: [a -> b, b -> a].
        let mut load = vec![[0.0f64; 2]; m];
        for (from, to, demand) in traffic.entries() {
            routes.for_each_hop(topo, from, to, |id, forward| {
                load[id.index()][if forward { 0 } else { 1 }] += demand;
            });
        }

        let t0 = k as f64 * cfg.interval_s;
        let t1 = t0 + cfg.interval_s;
        let mut links = Vec::with_capacity(m);
        let mut edges = Vec::with_capacity(m);
        for (idx, edge) in topo.edges().iter().enumerate() {
            let offered = load[idx][0] + load[idx][1];
            let scale = if offered > edge.capacity {
                edge.capacity / offered
            } else {
                1.0
            };
            let carried = [load[idx][0] * scale, load[idx][1] * scale];
            let utilization = (carried[0] + carried[1]) / edge.capacity;
            let loss_rate = cfg.loss_rate(utilization);

            let bytes = carried.map(|mbps| (mbps * 1e6 / 8.0 * cfg.interval_s).round() as u64);
            let packets = bytes.map(|b| (b as f64 / cfg.packet_bytes as f64).round() as u64);
            let delivered = packets.map(|p| p - (p as f64 * loss_rate).round() as u64);

            let (a_before, b_before) = ports[idx];
            let (a_before, b_before) = (
                PortCounters {
                    duration_s: t0,
                    ..a_before
                },
                PortCounters {
                    duration_s: t0,
                    ..b_before
                },
            );
            let a_after = PortCounters {
                tx_bytes: a_before.tx_bytes + bytes[0],
                rx_bytes: a_before.rx_bytes + bytes[1],
                tx_packets: a_before.tx_packets + packets[0],
                rx_packets: a_before.rx_packets + delivered[1],
                duration_s: t1,
            };
            let b_after = PortCounters {
                tx_bytes: b_before.tx_bytes + bytes[1],
                rx_bytes: b_before.rx_bytes + bytes[0],
                tx_packets: b_before.tx_packets + packets[1],
                rx_packets: b_before.rx_packets + delivered[0],
                duration_s: t1,
            };
            ports[idx] = (a_after, b_after);

            let bw = residual_bandwidth(&a_before, &a_after, edge.capacity)?;
            let loss = interval_loss(&a_before, &a_after, &b_before, &b_after)?;

            let queued = edge.base_delay * (1.0 + 2.0 * utilization * utilization);
            let (echo_a, echo_b) = (echo[edge.a.index()], echo[edge.b.index()]);
            let lldp = (echo_a + echo_b) / 2.0 + queued;
            let delay = link_delay(lldp, lldp, echo_a, echo_b);

            links.push(LinkState {
                bw: quantize(bw).min(edge.capacity),
                delay: quantize(delay),
                loss: quantize(loss),
            });
            edges.push(EdgeCounters {
                a_before,
                a_after,
                b_before,
                b_after,
                offered_mbps: offered,
                lldp_ms: (lldp, lldp),
                echo_ms: (echo_a, echo_b),
            });
        }
        let snap = NliSnapshot::new(topo, k as u32, links)?;
        out.push((snap, SnapshotTrace { traffic, edges }));
    }
    Ok(out)
}

/// Loss over one interval from packet-counter deltas. An idle direction
/// carries no evidence; an idle link reports zero loss.
fn interval_loss(
    a0: &PortCounters,
    a1: &PortCounters,
    b0: &PortCounters,
    b1: &PortCounters,
) -> Result<f64, NliError> {
    let delta = |before: &PortCounters, after: &PortCounters| PortCounters {
        tx_bytes: 0,
        rx_bytes: 0,
        tx_packets: after.tx_packets - before.tx_packets,
        rx_packets: after.rx_packets - before.rx_packets,
        duration_s: after.duration_s - before.duration_s,
    };
    let (a, b) = (delta(a0, a1), delta(b0, b1));
    match (a.tx_packets > 0, b.tx_packets > 0) {
        (true, true) => link_loss(&a, &b),
        (true, false) => Ok(one_way(a.tx_packets, b.rx_packets)),
        (false, true) => Ok(one_way(b.tx_packets, a.rx_packets)),
        (false, false) => Ok(0.0),
    }
}

fn one_way(sent: u64, received: u64) -> f64 {
    ((sent as f64 - received as f64) / sent as f64).clamp(0.0, 1.0)
}

fn quantize(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// BFS shortest-hop trees from every node; neighbors are expanded in
/// ascending id order so equal-hop ties resolve to the lowest ids.
struct MinHopRoutes {
    /// `parent[src][v]` is the predecessor edge of `v` on the route from `src`.
    parent: Vec<Vec<Option<(NodeId, EdgeId)>>>,
}

impl MinHopRoutes {
    fn new(topo: &Topology) -> Self {
        let n = topo.node_count();
        let parent = topo
            .nodes()
            .map(|src| {
                let mut par = vec![None; n];
                let mut seen = vec![false; n];
                seen[src.index()] = true;
                let mut queue = VecDeque::from([src]);
                while let Some(u) = queue.pop_front() {
                    for &(v, id) in topo.neighbors(u) {
                        if !seen[v.index()] {
                            seen[v.index()] = true;
                            par[v.index()] = Some((u, id));
                            queue.push_back(v);
                        }
                    }
                }
                par
            })
            .collect();
        MinHopRoutes { parent }
    }

    /// Visits each edge on the route with its traversal direction
    /// (`true` when going from the smaller to the larger endpoint id).
    fn for_each_hop(
        &self,
        topo: &Topology,
        from: NodeId,
        to: NodeId,
        mut f: impl FnMut(EdgeId, bool),
    ) {
        let par = &self.parent[from.index()];
        let mut at = to;
        while let Some((prev, id)) = par[at.index()] {
            f(id, topo.edge(id).a == prev);
            at = prev;
        }
    }
}
