use crate::env::RewardConfig;
use crate::nn::DEFAULT_CONV_WIDTHS;
use crate::per::PerConfig;

use super::{AgentError, EpsilonSchedule};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub episodes: usize,
    pub gamma: f64,
    pub lr: f64,
    pub batch: usize,
    /// Learn steps between target-network copies, counted per controller.
    pub target_sync: u64,
    pub meta_epsilon: EpsilonSchedule,
    pub intrinsic_epsilon: EpsilonSchedule,
    pub seed: u64,
    pub reward: RewardConfig,
    pub intrinsic_replay: PerConfig,
    pub meta_replay: PerConfig,
    pub conv_widths: Vec<usize>,
    /// Environment step cap per episode; `None` keeps 8n.
    pub step_cap: Option<usize>,
    /// Illegal-subgoal cap per episode; `None` keeps 4|D|.
    pub strike_cap: Option<usize>,
    /// Always pick the source as fork. With one destination this reduces the
    /// task to learning a single path with the intrinsic controller.
    pub force_source_subgoal: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            episodes: 4000,
            gamma: 0.9,
            lr: 1e-4,
            batch: 32,
            target_sync: 10,
            meta_epsilon: EpsilonSchedule::default(),
            intrinsic_epsilon: EpsilonSchedule::default(),
            seed: 0,
            reward: RewardConfig::default(),
            intrinsic_replay: PerConfig::default(),
            meta_replay: PerConfig::default(),
            conv_widths: DEFAULT_CONV_WIDTHS.to_vec(),
            step_cap: None,
            strike_cap: None,
            force_source_subgoal: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: &str| Err(AgentError::InvalidConfig(m.to_string()));
        if self.episodes == 0 {
            return bad("episodes must be positive");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be positive");
        }
        if self.batch == 0 {
            return bad("batch must be positive");
        }
        if self.target_sync == 0 {
            return bad("target_sync must be positive");
        }
        if !self.meta_epsilon.is_valid() || !self.intrinsic_epsilon.is_valid() {
            return bad("epsilon schedule out of range");
        }
        if self.conv_widths.is_empty() || self.conv_widths.contains(&0) {
            return bad("conv widths must be positive");
        }
        if self.step_cap == Some(0) || self.strike_cap == Some(0) {
            return bad("caps must be positive");
        }
        for per in [&self.intrinsic_replay, &self.meta_replay] {
            per.validate()
                .map_err(|e| AgentError::InvalidConfig(e.to_string()))?;
            if per.capacity < self.batch {
                return bad("replay capacity below batch size");
            }
        }
        self.reward
            .validate()
            .map_err(|e| AgentError::InvalidConfig(e.to_string()))?;
        Ok(())
    }
}
