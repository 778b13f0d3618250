//! Two-level controllers: a meta network choosing fork nodes and an
//! intrinsic network walking edges toward the next destination, trained with
//! double Q-learning from two prioritized replay buffers.

mod checkpoint;
mod config;
mod explore;
mod extract;
mod report;
mod train;

use thiserror::Error;

use crate::env::EnvError;
use crate::graph::{NodeId, Topology};
use crate::nn::{NetworkSpec, NnError, ParameterSet};
use crate::per::PerError;

pub use checkpoint::AgentCheckpoint;
pub use config::TrainConfig;
pub use explore::{argmax, epsilon, select_action, EpsilonSchedule};
pub use extract::{extract_tree, Extraction, ExtractionFailure};
pub use report::{EpisodeRecord, TrainReport};
pub use train::{train, train_observed, TrainOutcome};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("{controller} controller diverged in episode {episode}: {detail}")]
    Diverged {
        episode: usize,
        controller: &'static str,
        detail: String,
        /// Parameters at the moment of failure, for inspection.
        checkpoint: Box<AgentCheckpoint>,
    },
    #[error("checkpoint was trained on topology {expected}, got {found}")]
    TopologyMismatch { expected: String, found: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Per(#[from] PerError),
}

/// Source and destination set of one multicast request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub source: NodeId,
    pub destinations: Vec<NodeId>,
}

impl Task {
    pub fn new(source: u32, destinations: &[u32]) -> Self {
        Task {
            source: NodeId(source),
            destinations: destinations.iter().map(|&d| NodeId(d)).collect(),
        }
    }
}

/// Trained intrinsic and meta policy networks.
#[derive(Clone, Debug, PartialEq)]
pub struct Policies {
    pub intrinsic: ParameterSet,
    pub meta: ParameterSet,
}

impl Policies {
    pub(crate) fn check_shapes(&self, topo: &Topology) -> Result<(), AgentError> {
        let n = topo.node_count();
        let (i, m) = (self.intrinsic.spec(), self.meta.spec());
        let want_i = NetworkSpec::intrinsic(n, topo.max_degree()).with_conv_widths(&i.conv_widths);
        let want_m = NetworkSpec::meta(n).with_conv_widths(&m.conv_widths);
        for (got, want) in [(i, &want_i), (m, &want_m)] {
            if got.input_len() != want.input_len() || got.outputs != want.outputs {
                return Err(NnError::Shape {
                    expected: want.outputs,
                    got: got.outputs,
                }
                .into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
