use crate::env::{Env, RewardConfig};
use crate::graph::{validate_tree, MulticastTree, NliSnapshot, NodeId, Topology};
use crate::nn::q_values;

use super::explore::masked_argmax;
use super::{AgentError, Policies, Task};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionFailure {
    pub reason: String,
    pub steps: usize,
    /// Branches committed before the rollout stopped.
    pub partial: MulticastTree,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Extraction {
    Tree(MulticastTree),
    Failed(ExtractionFailure),
}

impl Extraction {
    pub fn tree(&self) -> Option<&MulticastTree> {
        match self {
            Extraction::Tree(t) => Some(t),
            Extraction::Failed(_) => None,
        }
    }
}

/// Greedy rollout: the meta controller may only pick nodes already on the
/// tree and the intrinsic controller only slots backed by a real edge. The
/// environment's step cap of 8n bounds the rollout.
pub fn extract_tree(
    policies: &Policies,
    topo: &Topology,
    snap: &NliSnapshot,
    task: &Task,
) -> Result<Extraction, AgentError> {
    policies.check_shapes(topo)?;
    let mut env = Env::new(
        topo,
        snap,
        task.source,
        &task.destinations,
        RewardConfig::default(),
    )?;
    let cap = 8 * topo.node_count();
    env.set_caps(cap, usize::MAX);
    let fail = |env: &Env, reason: String| {
        Ok(Extraction::Failed(ExtractionFailure {
            reason,
            steps: env.steps_taken(),
            partial: env.tree(),
        }))
    };
    while !env.is_over() {
        let q = q_values(&policies.meta, env.meta_state().as_slice(), 1)?;
        let legal: Vec<usize> = env.legal_forks().iter().map(|v| v.index()).collect();
        let g = masked_argmax(&q, legal).expect("source is always on the tree");
        env.subgoal_step(NodeId::from_index(g))?;
        loop {
            let q = q_values(&policies.intrinsic, env.intrinsic_state().as_slice(), 1)?;
            let degree = topo.degree(env.state().position);
            let a = masked_argmax(&q, 0..degree).expect("connected topology has no isolated nodes");
            let out = env.step(a)?;
            if out.g_f {
                break;
            }
            if out.truncated {
                return fail(&env, format!("step cap {cap} reached"));
            }
        }
    }
    let tree = env.tree();
    let report = validate_tree(topo, &tree);
    if !report.is_valid() {
        return fail(
            &env,
            format!("rollout produced an invalid tree: {report:?}"),
        );
    }
    Ok(Extraction::Tree(tree))
}
