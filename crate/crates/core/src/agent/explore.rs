use rand::Rng;

/// Exponentially decaying exploration rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    /// Episodes for the excess over `end` to shrink by a factor of e.
    pub decay: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            start: 1.0,
            end: 0.05,
            decay: 500.0,
        }
    }
}

impl EpsilonSchedule {
    pub fn at(&self, epoch: usize) -> f64 {
        epsilon(epoch, self)
    }

    pub(crate) fn is_valid(&self) -> bool {
        (0.0..=1.0).contains(&self.start)
            && (0.0..=1.0).contains(&self.end)
            && self.decay > 0.0
            && self.decay.is_finite()
    }
}

pub fn epsilon(epoch: usize, schedule: &EpsilonSchedule) -> f64 {
    schedule.end + (schedule.start - schedule.end) * (-(epoch as f64) / schedule.decay).exp()
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if v > q[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy over the whole output range. One coin is always drawn so
/// the random stream does not depend on the Q-values.
pub fn select_action<R: Rng + ?Sized>(q: &[f64], eps: f64, rng: &mut R) -> usize {
    assert!(!q.is_empty(), "empty action space");
    if rng.random::<f64>() < eps {
        rng.random_range(0..q.len())
    } else {
        argmax(q)
    }
}

/// Greedy choice among `allowed` indices.
pub(crate) fn masked_argmax(q: &[f64], allowed: impl IntoIterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in allowed {
        if best.is_none_or(|b| q[i] > q[b]) {
            best = Some(i);
        }
    }
    best
}
