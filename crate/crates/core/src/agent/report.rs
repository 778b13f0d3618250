use std::fmt::Write as _;
use std::time::Duration;

use crate::graph::MulticastTree;

use super::Extraction;

/// Totals over all snapshots of one episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub intrinsic_reward: f64,
    pub meta_reward: f64,
    /// Mean loss over the episode's learn steps; `None` when none ran.
    pub intrinsic_loss: Option<f64>,
    pub meta_loss: Option<f64>,
    pub eps_intrinsic: f64,
    pub eps_meta: f64,
    pub beta: f64,
    pub env_steps: usize,
    pub subgoals: usize,
    pub illegal_subgoals: usize,
    /// Snapshots on which every destination was reached.
    pub completed: usize,
    pub truncated: usize,
    /// Times each node (by zero-based index) was chosen as subgoal.
    pub subgoal_counts: Vec<u32>,
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub node_count: usize,
    pub snapshot_count: usize,
    pub episodes: Vec<EpisodeRecord>,
    /// Greedy extraction after training, one per snapshot.
    pub trees: Vec<Extraction>,
    pub intrinsic_learn_steps: u64,
    pub meta_learn_steps: u64,
    pub wall_clock: Duration,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl TrainReport {
    /// One row per episode. Wall-clock time is left out so identical runs
    /// produce identical files.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "episode,intrinsic_reward,meta_reward,intrinsic_loss,meta_loss,eps_intrinsic,eps_meta,beta,\
             env_steps,subgoals,illegal_subgoals,completed,truncated",
        );
        for i in 1..=self.node_count {
            write!(out, ",subgoal_{i}").unwrap();
        }
        out.push('\n');
        for r in &self.episodes {
            write!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.episode,
                r.intrinsic_reward,
                r.meta_reward,
                opt(r.intrinsic_loss),
                opt(r.meta_loss),
                r.eps_intrinsic,
                r.eps_meta,
                r.beta,
                r.env_steps,
                r.subgoals,
                r.illegal_subgoals,
                r.completed,
                r.truncated
            )
            .unwrap();
            for c in &r.subgoal_counts {
                write!(out, ",{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Total subgoal choices per node over the first and last `fraction` of episodes.
    pub fn subgoal_histogram(&self, fraction: f64) -> (Vec<u64>, Vec<u64>) {
        let take = ((self.episodes.len() as f64 * fraction).ceil() as usize)
            .clamp(1, self.episodes.len().max(1));
        let sum = |rows: &[EpisodeRecord]| {
            let mut acc = vec![0u64; self.node_count];
            for r in rows {
                for (a, &c) in acc.iter_mut().zip(&r.subgoal_counts) {
                    *a += c as u64;
                }
            }
            acc
        };
        let n = self.episodes.len();
        (
            sum(&self.episodes[..take.min(n)]),
            sum(&self.episodes[n - take.min(n)..]),
        )
    }

    /// Illegal subgoal picks over the first and last `fraction` of episodes.
    pub fn illegal_trend(&self, fraction: f64) -> (usize, usize) {
        let n = self.episodes.len();
        let take = ((n as f64 * fraction).ceil() as usize)
            .clamp(1, n.max(1))
            .min(n);
        let sum = |rows: &[EpisodeRecord]| rows.iter().map(|r| r.illegal_subgoals).sum();
        (sum(&self.episodes[..take]), sum(&self.episodes[n - take..]))
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let n = self.episodes.len();
        writeln!(out, "episodes: {n}  snapshots: {}", self.snapshot_count).unwrap();
        writeln!(
            out,
            "learn steps: intrinsic {}  meta {}",
            self.intrinsic_learn_steps, self.meta_learn_steps
        )
        .unwrap();
        let tail = &self.episodes[n - (n / 10).max(1).min(n)..];
        if !tail.is_empty() {
            let k = tail.len() as f64;
            writeln!(
                out,
                "last {} episodes: mean intrinsic reward {:.4}, mean meta reward {:.4}, completion {:.1}%",
                tail.len(),
                tail.iter().map(|r| r.intrinsic_reward).sum::<f64>() / k,
                tail.iter().map(|r| r.meta_reward).sum::<f64>() / k,
                100.0 * tail.iter().map(|r| r.completed).sum::<usize>() as f64 / (k * self.snapshot_count as f64),
            )
            .unwrap();
        }
        let (early, late) = self.illegal_trend(0.1);
        writeln!(out, "illegal subgoals: first 10% {early}, last 10% {late}").unwrap();
        for (k, t) in self.trees.iter().enumerate() {
            match t {
                Extraction::Tree(tree) => {
                    writeln!(out, "snapshot {k}: tree {}", format_edges(tree)).unwrap()
                }
                Extraction::Failed(f) => {
                    writeln!(out, "snapshot {k}: extraction failed ({})", f.reason).unwrap()
                }
            }
        }
        writeln!(out, "wall clock: {:.1}s", self.wall_clock.as_secs_f64()).unwrap();
        out
    }
}

fn format_edges(tree: &MulticastTree) -> String {
    format!(
        "{} edges {:?}",
        tree.edges.len(),
        tree.edges.iter().map(|e| e.0).collect::<Vec<_>>()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(episode: usize, illegal: usize) -> EpisodeRecord {
        EpisodeRecord {
            episode,
            intrinsic_reward: 0.5,
            meta_reward: -0.25,
            intrinsic_loss: Some(0.125),
            meta_loss: None,
            eps_intrinsic: 1.0,
            eps_meta: 1.0,
            beta: 0.4,
            env_steps: 3,
            subgoals: 2,
            illegal_subgoals: illegal,
            completed: 1,
            truncated: 0,
            subgoal_counts: vec![1, 0, illegal as u32],
        }
    }

    fn report(rows: Vec<EpisodeRecord>) -> TrainReport {
        TrainReport {
            node_count: 3,
            snapshot_count: 1,
            episodes: rows,
            trees: vec![],
            intrinsic_learn_steps: 0,
            meta_learn_steps: 0,
            wall_clock: Duration::from_secs(1),
        }
    }

    #[test]
    fn csv_layout() {
        let csv = report(vec![record(0, 1)]).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].ends_with("truncated,subgoal_1,subgoal_2,subgoal_3"));
        assert_eq!(lines[1], "0,0.5,-0.25,0.125,,1,1,0.4,3,2,1,1,0,1,0,1");
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    }

    #[test]
    fn trend_windows() {
        let rows = (0..20).map(|e| record(e, 20 - e)).collect();
        let r = report(rows);
        assert_eq!(r.illegal_trend(0.1), (20 + 19, 2 + 1));
        let (first, last) = r.subgoal_histogram(0.1);
        assert_eq!(first, vec![2, 0, 39]);
        assert_eq!(last, vec![2, 0, 3]);
        assert!(r.summary().contains("first 10% 39, last 10% 3"));
    }
}
