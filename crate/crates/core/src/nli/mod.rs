//! Synthetic link-state snapshots: gravity-model traffic routed over the
//! topology, turned into port counters, then measured the way a controller
//! would from counter deltas, LLDP and echo timings.

mod io;
mod measure;
mod sim;
mod traffic;

use thiserror::Error;

use crate::graph::GraphError;

pub use io::{load_snapshots, parse_snapshots, save_snapshots, write_snapshots, FORMAT_VERSION};
pub use measure::{link_delay, link_loss, residual_bandwidth, PortCounters};
pub use sim::{generate_snapshots, generate_with_trace, EdgeCounters, SimConfig, SnapshotTrace};
pub use traffic::{gravity_from_weights, gravity_traffic, TrafficMatrix};

#[derive(Debug, Error, PartialEq)]
pub enum NliError {
    #[error("counter duration must increase (delta {0} s)")]
    NonIncreasingDuration(f64),
    #[error("port reports zero sent packets")]
    NoPacketsSent,
    #[error("traffic volume must be positive and finite, got {0}")]
    InvalidVolume(f64),
    #[error("snapshot count must be at least 1")]
    NoSnapshots,
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("unsupported snapshot file version `{0}`")]
    UnsupportedVersion(String),
    #[error("snapshot file was written for topology {found}, expected {expected}")]
    TopologyMismatch { expected: String, found: String },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("truncated snapshot file: expected {expected} records, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("io error: {0}")]
    Io(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
