use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::env::Env;
use crate::graph::{NliSnapshot, NodeId, Topology};
use crate::nn::{
    q_loss_and_grad, q_values, sync_target, td_targets, Adam, NetworkSpec, ParameterSet,
};
use crate::per::{IntrinsicReplay, IntrinsicTransition, MetaReplay, MetaTransition, ReplayBuffer};

use super::{
    epsilon, extract_tree, select_action, AgentCheckpoint, AgentError, EpisodeRecord, Policies,
    Task, TrainConfig, TrainReport,
};

/// Policy and target network of one controller with its optimizer.
struct Controller {
    name: &'static str,
    policy: ParameterSet,
    target: ParameterSet,
    adam: Adam,
    learn_steps: u64,
    sync_every: u64,
}

/// What a learn step needs from a stored transition.
trait Experience {
    fn state(&self) -> &[f64];
    fn action(&self) -> usize;
    fn reward(&self) -> f64;
    fn next(&self) -> Option<&[f64]>;
}

impl Experience for IntrinsicTransition {
    fn state(&self) -> &[f64] {
        self.state.as_slice()
    }
    fn action(&self) -> usize {
        self.action
    }
    fn reward(&self) -> f64 {
        self.r_in
    }
    fn next(&self) -> Option<&[f64]> {
        self.next.as_ref().map(|s| s.as_slice())
    }
}

impl Experience for MetaTransition {
    fn state(&self) -> &[f64] {
        self.state.as_slice()
    }
    fn action(&self) -> usize {
        self.subgoal.index()
    }
    fn reward(&self) -> f64 {
        self.r_ex
    }
    fn next(&self) -> Option<&[f64]> {
        self.next.as_ref().map(|s| s.as_slice())
    }
}

impl Controller {
    fn new(
        name: &'static str,
        spec: &NetworkSpec,
        seed: u64,
        cfg: &TrainConfig,
    ) -> Result<Self, AgentError> {
        let policy = ParameterSet::init(spec, seed)?;
        Ok(Controller {
            name,
            target: sync_target(&policy),
            adam: Adam::new(policy.len(), cfg.lr),
            policy,
            learn_steps: 0,
            sync_every: cfg.target_sync,
        })
    }

    fn q(&self, state: &[f64]) -> Result<Vec<f64>, String> {
        q_values(&self.policy, state, 1).map_err(|e| e.to_string())
    }

    /// One prioritized minibatch update. Returns the loss, or `None` while
    /// the buffer holds fewer than `batch` transitions.
    fn learn<T: Experience, R: Rng>(
        &mut self,
        replay: &mut ReplayBuffer<T>,
        batch: usize,
        beta: f64,
        gamma: f64,
        rng: &mut R,
    ) -> Result<Option<f64>, String> {
        if replay.len() < batch {
            return Ok(None);
        }
        let sample = replay.sample(batch, beta, rng).map_err(|e| e.to_string())?;
        let rewards: Vec<f64> = sample.items.iter().map(|t| t.reward()).collect();
        let next: Vec<Option<&[f64]>> = sample.items.iter().map(|t| t.next()).collect();
        let targets =
            td_targets(&rewards, &next, &self.target, gamma).map_err(|e| e.to_string())?;
        let states: Vec<f64> = sample
            .items
            .iter()
            .flat_map(|t| t.state().iter().copied())
            .collect();
        let actions: Vec<usize> = sample.items.iter().map(|t| t.action()).collect();
        let eval = q_loss_and_grad(&self.policy, &states, &actions, &targets, &sample.weights)
            .map_err(|e| e.to_string())?;
        let indices = sample.indices;
        if !eval.loss.is_finite() {
            return Err(format!("loss {}", eval.loss));
        }
        if let Some(k) = eval.grad.iter().position(|g| !g.is_finite()) {
            return Err(format!("gradient entry {k} is {}", eval.grad[k]));
        }
        replay
            .update_priorities(&indices, &eval.td_errors)
            .map_err(|e| e.to_string())?;
        self.adam
            .step(&mut self.policy, &eval.grad)
            .map_err(|e| e.to_string())?;
        self.learn_steps += 1;
        if self.learn_steps.is_multiple_of(self.sync_every) {
            self.target = sync_target(&self.policy);
        }
        Ok(Some(eval.loss))
    }
}

/// Running sum of losses within an episode.
#[derive(Default)]
struct LossMean {
    sum: f64,
    count: usize,
}

impl LossMean {
    fn add(&mut self, loss: Option<f64>) {
        if let Some(l) = loss {
            self.sum += l;
            self.count += 1;
        }
    }

    fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub checkpoint: AgentCheckpoint,
    pub report: TrainReport,
}

pub fn train(
    cfg: &TrainConfig,
    topo: &Topology,
    snapshots: &[NliSnapshot],
    task: &Task,
) -> Result<TrainOutcome, AgentError> {
    train_observed(cfg, topo, snapshots, task, |_| {})
}

/// [`train`] with a callback after every episode.
pub fn train_observed(
    cfg: &TrainConfig,
    topo: &Topology,
    snapshots: &[NliSnapshot],
    task: &Task,
    mut observe: impl FnMut(&EpisodeRecord),
) -> Result<TrainOutcome, AgentError> {
    cfg.validate()?;
    if snapshots.is_empty() {
        return Err(AgentError::InvalidConfig(
            "at least one snapshot is required".into(),
        ));
    }
    let started = Instant::now();
    let n = topo.node_count();
    let width = topo.max_degree();
    let mut envs = snapshots
        .iter()
        .map(|snap| {
            let mut env = Env::new(
                topo,
                snap,
                task.source,
                &task.destinations,
                cfg.reward.clone(),
            )?;
            env.set_caps(
                cfg.step_cap.unwrap_or(8 * n),
                cfg.strike_cap.unwrap_or(4 * task.destinations.len()),
            );
            Ok(env)
        })
        .collect::<Result<Vec<_>, AgentError>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let intrinsic_spec = NetworkSpec::intrinsic(n, width).with_conv_widths(&cfg.conv_widths);
    let meta_spec = NetworkSpec::meta(n).with_conv_widths(&cfg.conv_widths);
    let mut intrinsic = Controller::new("intrinsic", &intrinsic_spec, rng.random(), cfg)?;
    let mut meta = Controller::new("meta", &meta_spec, rng.random(), cfg)?;
    let mut per1: IntrinsicReplay = ReplayBuffer::new(cfg.intrinsic_replay.clone())?;
    let mut per2: MetaReplay = ReplayBuffer::new(cfg.meta_replay.clone())?;

    let mut episodes = Vec::with_capacity(cfg.episodes);
    for episode in 0..cfg.episodes {
        let eps_in = epsilon(episode, &cfg.intrinsic_epsilon);
        let eps_meta = epsilon(episode, &cfg.meta_epsilon);
        let progress = if cfg.episodes > 1 {
            episode as f64 / (cfg.episodes - 1) as f64
        } else {
            1.0
        };
        let beta_in = cfg.intrinsic_replay.beta(progress);
        let beta_meta = cfg.meta_replay.beta(progress);
        let mut rec = EpisodeRecord {
            episode,
            intrinsic_reward: 0.0,
            meta_reward: 0.0,
            intrinsic_loss: None,
            meta_loss: None,
            eps_intrinsic: eps_in,
            eps_meta,
            beta: beta_in,
            env_steps: 0,
            subgoals: 0,
            illegal_subgoals: 0,
            completed: 0,
            truncated: 0,
            subgoal_counts: vec![0; n],
        };
        let mut in_loss = LossMean::default();
        let mut meta_loss = LossMean::default();

        // Any non-finite value inside a network aborts with the current parameters attached.
        macro_rules! diverged {
            ($name:expr, $detail:expr) => {
                return Err(AgentError::Diverged {
                    episode,
                    controller: $name,
                    detail: $detail,
                    checkpoint: Box::new(AgentCheckpoint {
                        topology_hash: topo.content_hash(),
                        task: task.clone(),
                        policies: Policies {
                            intrinsic: intrinsic.policy.clone(),
                            meta: meta.policy.clone(),
                        },
                    }),
                })
            };
        }
        macro_rules! learn {
            ($ctrl:expr, $replay:expr, $beta:expr, $acc:expr) => {
                match $ctrl.learn(&mut $replay, cfg.batch, $beta, cfg.gamma, &mut rng) {
                    Ok(loss) => $acc.add(loss),
                    Err(detail) => diverged!($ctrl.name, detail),
                }
            };
        }
        macro_rules! greedy_q {
            ($ctrl:expr, $state:expr) => {
                match $ctrl.q($state.as_slice()) {
                    Ok(q) => q,
                    Err(detail) => diverged!($ctrl.name, detail),
                }
            };
        }

        for env in envs.iter_mut() {
            env.reset();
            while !env.is_over() {
                let s_meta = env.meta_state();
                let g = if cfg.force_source_subgoal {
                    task.source.index()
                } else {
                    select_action(&greedy_q!(meta, s_meta), eps_meta, &mut rng)
                };
                let subgoal = NodeId::from_index(g);
                rec.subgoals += 1;
                rec.subgoal_counts[g] += 1;
                let picked = env.subgoal_step(subgoal)?;
                if !picked.legal {
                    rec.illegal_subgoals += 1;
                    rec.meta_reward += picked.r_ex;
                    rec.truncated += picked.truncated as usize;
                    per2.push(MetaTransition {
                        next: Some(s_meta.clone()),
                        state: s_meta,
                        subgoal,
                        r_ex: picked.r_ex,
                    });
                    learn!(meta, per2, beta_meta, meta_loss);
                    continue;
                }
                loop {
                    let s_in = env.intrinsic_state();
                    let a = select_action(&greedy_q!(intrinsic, s_in), eps_in, &mut rng);
                    let out = env.step(a)?;
                    rec.env_steps += 1;
                    rec.intrinsic_reward += out.r_in;
                    let next_in = (!out.g_f).then(|| env.intrinsic_state());
                    per1.push(IntrinsicTransition {
                        state: s_in,
                        action: a,
                        subgoal,
                        r_in: out.r_in,
                        next: next_in,
                    });
                    learn!(intrinsic, per1, beta_in, in_loss);
                    if out.g_f || out.truncated {
                        // A cut-off subgoal earns no extrinsic reward but is still experience for the meta level.
                        if !cfg.force_source_subgoal {
                            let next = (!out.s_f).then(|| env.meta_state());
                            per2.push(MetaTransition {
                                state: s_meta,
                                subgoal,
                                r_ex: out.r_ex,
                                next,
                            });
                            learn!(meta, per2, beta_meta, meta_loss);
                        }
                        rec.meta_reward += out.r_ex;
                        rec.completed += out.s_f as usize;
                        rec.truncated += out.truncated as usize;
                        break;
                    }
                }
            }
        }
        rec.intrinsic_loss = in_loss.mean();
        rec.meta_loss = meta_loss.mean();
        observe(&rec);
        episodes.push(rec);
    }

    let policies = Policies {
        intrinsic: intrinsic.policy,
        meta: meta.policy,
    };
    let trees = snapshots
        .iter()
        .map(|snap| extract_tree(&policies, topo, snap, task))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TrainOutcome {
        report: TrainReport {
            node_count: n,
            snapshot_count: snapshots.len(),
            episodes,
            trees,
            intrinsic_learn_steps: intrinsic.learn_steps,
            meta_learn_steps: meta.learn_steps,
            wall_clock: started.elapsed(),
        },
        checkpoint: AgentCheckpoint {
            topology_hash: topo.content_hash(),
            task: task.clone(),
            policies,
        },
    })
}
