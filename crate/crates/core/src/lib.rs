//! Multicast routing with a two-level deep Q-learning agent.
//!
//! The meta controller picks a fork node on the partial multicast tree and
//! the intrinsic controller walks from that fork to the next destination one
//! adjacent edge at a time. Link state comes from simulated snapshots of
//! residual bandwidth, delay and loss; classic Steiner heuristics and an exact
//! dynamic program serve as baselines and as a correctness oracle.

pub mod agent;
pub mod env;
pub mod graph;
pub mod nli;
pub mod nn;
pub mod per;
pub mod state;
pub mod steiner;
