//! Proportional prioritized replay over a sum tree.
//!
//! Stored priorities are `p_i = |td| + eps`; the tree holds `p_i^alpha`, so a
//! stratified draw picks slot `i` with probability `p_i^alpha / sum_k p_k^alpha`.

mod sumtree;

use rand::Rng;
use thiserror::Error;

use crate::graph::NodeId;
use crate::state::{IntrinsicState, MetaState};

pub use sumtree::SumTree;

#[derive(Debug, Error, PartialEq)]
pub enum PerError {
    #[error("need {need} transitions to sample, buffer holds {have}")]
    Insufficient { have: usize, need: usize },
    #[error("invalid replay config: {0}")]
    InvalidConfig(String),
    #[error("slot {0} is not populated")]
    BadIndex(usize),
    #[error("non-finite td error {0}")]
    NonFinite(f64),
    #[error("{indices} indices but {errors} td errors")]
    LengthMismatch { indices: usize, errors: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerConfig {
    pub capacity: usize,
    pub alpha: f64,
    pub beta_start: f64,
    pub beta_end: f64,
    /// Added to `|td|` so no transition becomes unsampleable.
    pub eps: f64,
}

impl Default for PerConfig {
    fn default() -> Self {
        PerConfig {
            capacity: 2048,
            alpha: 0.6,
            beta_start: 0.4,
            beta_end: 1.0,
            eps: 1e-6,
        }
    }
}

impl PerConfig {
    pub fn validate(&self) -> Result<(), PerError> {
        let bad = |m: &str| Err(PerError::InvalidConfig(m.to_string()));
        if self.capacity == 0 {
            return bad("capacity must be positive");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.beta_start) || !(0.0..=1.0).contains(&self.beta_end) {
            return bad("beta must lie in [0, 1]");
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps must be positive");
        }
        Ok(())
    }

    /// Importance exponent after `progress` in `[0, 1]` of training.
    pub fn beta(&self, progress: f64) -> f64 {
        let t = progress.clamp(0.0, 1.0);
        self.beta_start + (self.beta_end - self.beta_start) * t
    }
}

/// Lower-level experience: `(s, a, g, r_in, s')`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntrinsicTransition {
    pub state: IntrinsicState,
    pub action: usize,
    pub subgoal: NodeId,
    pub r_in: f64,
    /// `None` for terminal transitions.
    pub next: Option<IntrinsicState>,
}

/// Upper-level experience: `(s, g, r_ex, s')`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetaTransition {
    pub state: MetaState,
    pub subgoal: NodeId,
    pub r_ex: f64,
    pub next: Option<MetaState>,
}

pub type IntrinsicReplay = ReplayBuffer<IntrinsicTransition>;
pub type MetaReplay = ReplayBuffer<MetaTransition>;

/// A sampled minibatch borrowing from the buffer.
#[derive(Debug)]
pub struct Batch<'a, T> {
    pub indices: Vec<usize>,
    pub items: Vec<&'a T>,
    /// Importance weights divided by their batch maximum.
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ReplayBuffer<T> {
    cfg: PerConfig,
    tree: SumTree,
    slots: Vec<T>,
    /// Raw priorities `p_i`, parallel to `slots`.
    priorities: Vec<f64>,
    next: usize,
    max_priority: f64,
}

impl<T> ReplayBuffer<T> {
    pub fn new(cfg: PerConfig) -> Result<Self, PerError> {
        cfg.validate()?;
        Ok(ReplayBuffer {
            tree: SumTree::new(cfg.capacity),
            slots: Vec::with_capacity(cfg.capacity),
            priorities: Vec::with_capacity(cfg.capacity),
            next: 0,
            max_priority: 1.0,
            cfg,
        })
    }

    pub fn config(&self) -> &PerConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.cfg.capacity
    }

    /// Priority given to the next pushed transition: the largest priority
    /// ever assigned, 1.0 before any update.
    pub fn max_priority(&self) -> f64 {
        self.max_priority
    }

    pub fn priority(&self, index: usize) -> Option<f64> {
        self.priorities.get(index).copied()
    }

    pub fn get(&self, index: usize) -> Option<&T> {
        self.slots.get(index)
    }

    /// Sum of `p_i^alpha` held at the tree root.
    pub fn total_mass(&self) -> f64 {
        self.tree.total()
    }

    pub fn tree(&self) -> &SumTree {
        &self.tree
    }

    /// Sampling probability of a slot.
    pub fn probability(&self, index: usize) -> Option<f64> {
        (index < self.len()).then(|| self.tree.get(index) / self.tree.total())
    }

    /// Stored transitions from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        let split = if self.len() < self.capacity() {
            0
        } else {
            self.next
        };
        self.slots[split..].iter().chain(&self.slots[..split])
    }

    /// Inserts at the current maximum priority, overwriting the oldest entry when full.
    pub fn push(&mut self, item: T) -> usize {
        let at = self.next;
        if at == self.slots.len() {
            self.slots.push(item);
            self.priorities.push(self.max_priority);
        } else {
            self.slots[at] = item;
            self.priorities[at] = self.max_priority;
        }
        self.tree.set(at, self.max_priority.powf(self.cfg.alpha));
        self.next = (at + 1) % self.cfg.capacity;
        at
    }

    /// Draws `k` slots, one from each of `k` equal slices of the priority mass.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        k: usize,
        beta: f64,
        rng: &mut R,
    ) -> Result<Batch<'_, T>, PerError> {
        if k == 0 || self.len() < k {
            return Err(PerError::Insufficient {
                have: self.len(),
                need: k.max(1),
            });
        }
        let total = self.tree.total();
        let segment = total / k as f64;
        let n = self.len() as f64;
        let mut indices = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        for j in 0..k {
            let lo = segment * j as f64;
            let mass = lo + rng.random::<f64>() * segment;
            let i = self.tree.find(mass);
            indices.push(i);
            weights.push((n * self.tree.get(i) / total).powf(-beta));
        }
        let max = weights.iter().copied().fold(0.0, f64::max);
        for w in &mut weights {
            *w /= max;
        }
        let items = indices.iter().map(|&i| &self.slots[i]).collect();
        Ok(Batch {
            indices,
            items,
            weights,
        })
    }

    /// Sets `p_i = |td_i| + eps` for each sampled slot.
    pub fn update_priorities(
        &mut self,
        indices: &[usize],
        td_errors: &[f64],
    ) -> Result<(), PerError> {
        if indices.len() != td_errors.len() {
            return Err(PerError::LengthMismatch {
                indices: indices.len(),
                errors: td_errors.len(),
            });
        }
        for (&i, &td) in indices.iter().zip(td_errors) {
            if i >= self.len() {
                return Err(PerError::BadIndex(i));
            }
            if !td.is_finite() {
                return Err(PerError::NonFinite(td));
            }
        }
        for (&i, &td) in indices.iter().zip(td_errors) {
            let p = td.abs() + self.cfg.eps;
            self.priorities[i] = p;
            self.max_priority = self.max_priority.max(p);
            self.tree.set(i, p.powf(self.cfg.alpha));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
