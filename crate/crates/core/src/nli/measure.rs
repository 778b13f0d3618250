use super::NliError;

/// Cumulative statistics of one switch port at one sampling instant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PortCounters {
    pub tx_bytes: u64,
    pub rx_bytes: u64,
    pub tx_packets: u64,
    pub rx_packets: u64,
    /// Seconds the port has been up.
    pub duration_s: f64,
}

/// Residual bandwidth (Mbit/s) from two samples of the same port.
///
/// Byte deltas are converted to Mbit/s before subtracting from the link
/// capacity; the result is clamped to `[0, capacity]`.
pub fn residual_bandwidth(
    before: &PortCounters,
    after: &PortCounters,
    capacity_mbps: f64,
) -> Result<f64, NliError> {
    let dt = after.duration_s - before.duration_s;
    if !(dt > 0.0) {
        return Err(NliError::NonIncreasingDuration(dt));
    }
    let total = |c: &PortCounters| c.tx_bytes as i128 + c.rx_bytes as i128;
    let delta_bytes = (total(after) - total(before)).unsigned_abs() as f64;
    let used_mbps = delta_bytes * 8.0 / 1e6 / dt;
    Ok((capacity_mbps - used_mbps).clamp(0.0, capacity_mbps))
}

/// Loss rate of the link joining ports `i` and `j`: the worse of the two
/// directions, clamped to `[0, 1]`.
pub fn link_loss(i: &PortCounters, j: &PortCounters) -> Result<f64, NliError> {
    if i.tx_packets == 0 || j.tx_packets == 0 {
        return Err(NliError::NoPacketsSent);
    }
    let direction = |sent: u64, received: u64| (sent as f64 - received as f64) / sent as f64;
    let loss = direction(i.tx_packets, j.rx_packets).max(direction(j.tx_packets, i.rx_packets));
    Ok(loss.clamp(0.0, 1.0))
}

/// One-way link delay (ms) from the two LLDP traversal times and the two
/// controller echo round trips; never negative.
pub fn link_delay(lldp_fwd: f64, lldp_rev: f64, echo_i: f64, echo_j: f64) -> f64 {
    ((lldp_fwd + lldp_rev - echo_i - echo_j) / 2.0).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bytes(total: u64, t: f64) -> PortCounters {
        PortCounters {
            tx_bytes: total / 2,
            rx_bytes: total - total / 2,
            duration_s: t,
            ..Default::default()
        }
    }

    #[test]
    fn idle_link_keeps_capacity() {
        let c = bytes(5_000, 1.0);
        let d = bytes(5_000, 2.0);
        assert_eq!(residual_bandwidth(&c, &d, 100.0).unwrap(), 100.0);
    }

    #[test]
    fn ten_megabit_load() {
        let c = bytes(0, 0.0);
        let d = bytes(1_250_000, 1.0);
        assert!((residual_bandwidth(&c, &d, 100.0).unwrap() - 90.0).abs() < 1e-9);
    }

    #[test]
    fn overload_clamps_to_zero() {
        let c = bytes(0, 0.0);
        let d = bytes(50_000_000, 1.0);
        assert_eq!(residual_bandwidth(&c, &d, 100.0).unwrap(), 0.0);
    }

    #[test]
    fn duration_must_increase() {
        let c = bytes(0, 1.0);
        assert!(matches!(
            residual_bandwidth(&c, &c, 100.0),
            Err(NliError::NonIncreasingDuration(_))
        ));
    }

    fn pkts(tx: u64, rx: u64) -> PortCounters {
        PortCounters {
            tx_packets: tx,
            rx_packets: rx,
            ..Default::default()
        }
    }

    #[test]
    fn loss_examples() {
        assert_eq!(
            link_loss(&pkts(1000, 1000), &pkts(1000, 1000)).unwrap(),
            0.0
        );
        let l = link_loss(&pkts(1000, 1990), &pkts(2000, 990)).unwrap();
        assert!((l - 0.01).abs() < 1e-12);
        // rx > tx on one direction yields a negative term; the other direction wins.
        let l = link_loss(&pkts(1000, 1010), &pkts(1000, 990)).unwrap();
        assert!((l - 0.01).abs() < 1e-12);
        assert_eq!(
            link_loss(&pkts(0, 0), &pkts(10, 0)),
            Err(NliError::NoPacketsSent)
        );
    }

    #[test]
    fn delay_examples() {
        assert!((link_delay(10.0, 12.0, 4.0, 6.0) - 6.0).abs() < 1e-12);
        assert_eq!(link_delay(3.0, 5.0, 3.0, 5.0), 0.0);
        assert_eq!(link_delay(1.0, 1.0, 3.0, 5.0), 0.0);
    }

    proptest! {
        #[test]
        fn residual_monotone_in_load(a in 0u64..40_000_000, b in 0u64..40_000_000, cap in 1.0f64..1000.0) {
            let (lo, hi) = (a.min(b), a.max(b));
            let start = bytes(0, 0.0);
            let r_lo = residual_bandwidth(&start, &bytes(lo, 2.0), cap).unwrap();
            let r_hi = residual_bandwidth(&start, &bytes(hi, 2.0), cap).unwrap();
            prop_assert!(r_hi <= r_lo);
            prop_assert!((0.0..=cap).contains(&r_hi));
        }

        #[test]
        fn loss_symmetric_in_port_roles(tx_i in 1u64..10_000, rx_i in 0u64..10_000, tx_j in 1u64..10_000, rx_j in 0u64..10_000) {
            let i = pkts(tx_i, rx_i);
            let j = pkts(tx_j, rx_j);
            prop_assert_eq!(link_loss(&i, &j).unwrap(), link_loss(&j, &i).unwrap());
        }
    }
}
