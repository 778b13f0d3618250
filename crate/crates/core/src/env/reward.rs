use super::EnvError;
use crate::graph::{EdgeId, LinkState, MulticastTree, Topology};

/// Reward weights and penalties.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardConfig {
    /// Weights of bandwidth, delay and loss terms; non-negative, summing to 1.
    pub beta: [f64; 3],
    /// Scale of the per-edge step reward relative to the goal reward.
    pub step_ratio: f64,
    /// Penalty for choosing a fork node outside the tree.
    pub illegal: f64,
    /// Penalty for an action slot with no edge behind it.
    pub none: f64,
    /// Penalty for walking back along the tree or closing a cycle.
    pub back: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            beta: [1.0 / 3.0; 3],
            step_ratio: 0.01,
            illegal: -0.5,
            none: -0.5,
            back: -0.5,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |msg: String| Err(EnvError::InvalidRewardConfig(msg));
        if self.beta.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return bad(format!(
                "beta weights must be non-negative, got {:?}",
                self.beta
            ));
        }
        if (self.beta.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad(format!("beta weights must sum to 1, got {:?}", self.beta));
        }
        if !(self.step_ratio.is_finite() && self.step_ratio > 0.0) {
            return bad(format!(
                "step_ratio must be positive, got {}",
                self.step_ratio
            ));
        }
        for (name, p) in [
            ("illegal", self.illegal),
            ("none", self.none),
            ("back", self.back),
        ] {
            if !(p.is_finite() && p < 0.0) {
                return bad(format!("penalty `{name}` must be negative, got {p}"));
            }
        }
        Ok(())
    }

    fn score(&self, bw: f64, delay: f64, loss: f64) -> f64 {
        let [b1, b2, b3] = self.beta;
        b1 * bw + b2 * (1.0 - delay) + b3 * (1.0 - loss)
    }
}

/// Reward for one forward hop over a normalized link.
pub fn reward_step(cfg: &RewardConfig, link: &LinkState) -> f64 {
    cfg.step_ratio * cfg.score(link.bw, link.delay, link.loss)
}

/// Reward for a completed fork-to-destination path, from its bottleneck,
/// summed delay and compound loss over normalized links.
pub fn reward_goal(cfg: &RewardConfig, norm: &[LinkState], path: &[EdgeId]) -> f64 {
    let (bw, delay, loss) = aggregate(norm, path);
    cfg.score(bw, delay, loss)
}

/// Reward for the finished tree: mean destination bottleneck, summed delay
/// and compound loss over all tree edges, on normalized links.
pub fn reward_finish(
    cfg: &RewardConfig,
    topo: &Topology,
    norm: &[LinkState],
    tree: &MulticastTree,
) -> Result<f64, EnvError> {
    let paths = tree.paths(topo)?;
    let bw = paths.values().map(|p| aggregate(norm, p).0).sum::<f64>() / paths.len() as f64;
    let edges: Vec<EdgeId> = tree.edges.iter().copied().collect();
    let (_, delay, loss) = aggregate(norm, &edges);
    Ok(cfg.score(bw, delay, loss))
}

fn aggregate(norm: &[LinkState], edges: &[EdgeId]) -> (f64, f64, f64) {
    let mut bw = f64::INFINITY;
    let mut delay = 0.0;
    let mut keep = 1.0;
    for &id in edges {
        let l = &norm[id.index()];
        bw = bw.min(l.bw);
        delay += l.delay;
        keep *= 1.0 - l.loss;
    }
    (bw, delay, 1.0 - keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(bw: f64, delay: f64, loss: f64) -> LinkState {
        LinkState { bw, delay, loss }
    }

    #[test]
    fn best_case_link_scores_one() {
        let cfg = RewardConfig::default();
        let norm = [link(1.0, 0.0, 0.0)];
        assert!((reward_goal(&cfg, &norm, &[EdgeId(0)]) - 1.0).abs() < 1e-12);
        assert!((reward_step(&cfg, &norm[0]) - 0.01).abs() < 1e-12);
    }

    #[test]
    fn half_metrics_score_half() {
        let cfg = RewardConfig::default();
        let norm = [link(0.5, 0.5, 0.5)];
        assert!((reward_goal(&cfg, &norm, &[EdgeId(0)]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn goal_reward_ignores_edge_order() {
        let cfg = RewardConfig {
            beta: [0.5, 0.3, 0.2],
            ..RewardConfig::default()
        };
        let norm = [
            link(0.9, 0.1, 0.05),
            link(0.2, 0.3, 0.4),
            link(0.6, 0.0, 0.1),
        ];
        let a = reward_goal(&cfg, &norm, &[EdgeId(0), EdgeId(1), EdgeId(2)]);
        let b = reward_goal(&cfg, &norm, &[EdgeId(2), EdgeId(0), EdgeId(1)]);
        assert!((a - b).abs() < 1e-12);
        // bw 0.2, delay 0.4, loss 1 - 0.95*0.6*0.9 = 0.487
        assert!((a - (0.5 * 0.2 + 0.3 * 0.6 + 0.2 * 0.513)).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(RewardConfig::default().validate().is_ok());
        assert!(RewardConfig {
            beta: [0.5, 0.5, 0.5],
            ..RewardConfig::default()
        }
        .validate()
        .is_err());
        assert!(RewardConfig {
            back: 0.1,
            ..RewardConfig::default()
        }
        .validate()
        .is_err());
        assert!(RewardConfig {
            step_ratio: 0.0,
            ..RewardConfig::default()
        }
        .validate()
        .is_err());
    }
}
