//! Two-level routing environment.
//!
//! The meta level picks a fork node on the committed tree; the intrinsic
//! level then walks one adjacent edge at a time until it enters a
//! destination that has not been reached yet. Only the part of the walk that
//! joins that destination to the committed tree is kept.

mod reward;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{EdgeId, GraphError, LinkState, MulticastTree, NliSnapshot, NodeId, Topology};
use crate::state::{
    encode_goal_matrix, encode_link_matrices, encode_tree_state, stack_intrinsic, stack_meta,
    IntrinsicState, LinkChannels, MetaState,
};

pub use reward::{reward_finish, reward_goal, reward_step, RewardConfig};

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("no fork node is active; choose a subgoal first")]
    NoActiveSubgoal,
    #[error("episode already ended")]
    EpisodeOver,
    #[error("action {action} outside 0..{width}")]
    ActionOutOfRange { action: usize, width: usize },
    #[error("fork node {0} outside the topology")]
    UnknownNode(NodeId),
    #[error("invalid reward config: {0}")]
    InvalidRewardConfig(String),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// What an intrinsic action did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// New edge to a node off the tree and walk.
    Forward,
    /// The slot has no edge.
    None,
    /// Edge already on the tree or the current walk.
    Back,
    /// New edge whose far end is already on the tree or walk.
    Cycle,
}

/// Everything the encodings are computed from. Step and strike counters
/// live in [`Env`], so a no-op action leaves this value unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvState {
    /// Committed tree edges.
    pub tree: BTreeSet<EdgeId>,
    pub tree_nodes: BTreeSet<NodeId>,
    /// Edges added by forward moves since the current fork was chosen.
    pub walk: BTreeSet<EdgeId>,
    /// Edge through which each walk node was first entered.
    pub walk_entry: BTreeMap<NodeId, EdgeId>,
    /// Selection count per edge, drawn into the tree channel.
    pub marks: Vec<u32>,
    pub position: NodeId,
    pub fork: Option<NodeId>,
    pub fork_history: Vec<NodeId>,
    pub remaining: BTreeSet<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubgoalOutcome {
    pub legal: bool,
    /// Meta reward: the illegal-fork penalty, else 0.
    pub r_ex: f64,
    /// Illegal-fork budget exhausted; the episode is over.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub scenario: Scenario,
    pub next_state: EnvState,
    pub r_in: f64,
    /// Nonzero only when a destination is reached.
    pub r_ex: f64,
    /// All destinations reached.
    pub s_f: bool,
    /// The current subgoal's destination reached.
    pub g_f: bool,
    /// Step budget exhausted before finishing.
    pub truncated: bool,
}

pub struct Env<'a> {
    topo: &'a Topology,
    norm: Vec<LinkState>,
    links: LinkChannels,
    cfg: RewardConfig,
    source: NodeId,
    destinations: BTreeSet<NodeId>,
    state: EnvState,
    steps: usize,
    strikes: usize,
    step_cap: usize,
    strike_cap: usize,
    over: bool,
}

impl<'a> Env<'a> {
    pub fn new(
        topo: &'a Topology,
        snap: &NliSnapshot,
        source: NodeId,
        destinations: &[NodeId],
        cfg: RewardConfig,
    ) -> Result<Self, EnvError> {
        cfg.validate()?;
        if snap.links().len() != topo.edge_count() {
            return Err(
                GraphError::InvalidSnapshot("snapshot does not match topology".into()).into(),
            );
        }
        let destinations: BTreeSet<NodeId> = destinations.iter().copied().collect();
        for &v in destinations.iter().chain([&source]) {
            if !topo.contains(v) {
                return Err(EnvError::UnknownNode(v));
            }
        }
        if destinations.is_empty() || destinations.contains(&source) {
            return Err(EnvError::InvalidTask(
                "destinations must be non-empty and exclude the source".into(),
            ));
        }
        let state = Self::initial_state(topo, source, &destinations);
        Ok(Env {
            topo,
            norm: snap.normalized(),
            links: encode_link_matrices(topo, snap),
            cfg,
            source,
            step_cap: 8 * topo.node_count(),
            strike_cap: 4 * destinations.len(),
            destinations,
            state,
            steps: 0,
            strikes: 0,
            over: false,
        })
    }

    fn initial_state(topo: &Topology, source: NodeId, destinations: &BTreeSet<NodeId>) -> EnvState {
        EnvState {
            tree: BTreeSet::new(),
            tree_nodes: BTreeSet::from([source]),
            walk: BTreeSet::new(),
            walk_entry: BTreeMap::new(),
            marks: vec![0; topo.edge_count()],
            position: source,
            fork: None,
            fork_history: Vec::new(),
            remaining: destinations.clone(),
        }
    }

    pub fn reset(&mut self) -> &EnvState {
        self.state = Self::initial_state(self.topo, self.source, &self.destinations);
        self.steps = 0;
        self.strikes = 0;
        self.over = false;
        &self.state
    }

    pub fn topology(&self) -> &Topology {
        self.topo
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    pub fn is_over(&self) -> bool {
        self.over
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn normalized_links(&self) -> &[LinkState] {
        &self.norm
    }

    pub fn reward_config(&self) -> &RewardConfig {
        &self.cfg
    }

    /// Nodes that may be chosen as the next fork: the committed tree's nodes.
    pub fn legal_forks(&self) -> &BTreeSet<NodeId> {
        &self.state.tree_nodes
    }

    pub fn set_caps(&mut self, step_cap: usize, strike_cap: usize) {
        self.step_cap = step_cap;
        self.strike_cap = strike_cap;
    }

    pub fn meta_state(&self) -> MetaState {
        stack_meta(&self.tree_matrix(), &self.links)
    }

    pub fn intrinsic_state(&self) -> IntrinsicState {
        let goal = encode_goal_matrix(self.topo.node_count(), &self.state.fork_history);
        stack_intrinsic(&self.tree_matrix(), &self.links, &goal)
    }

    fn tree_matrix(&self) -> crate::state::Matrix {
        encode_tree_state(self.topo, &self.state.marks, Some(self.state.position))
    }

    /// The edge behind action slot `a` at the current position.
    pub fn action_edge(&self, a: usize) -> Option<(NodeId, EdgeId)> {
        self.topo.neighbors(self.state.position).get(a).copied()
    }

    pub fn subgoal_step(&mut self, g: NodeId) -> Result<SubgoalOutcome, EnvError> {
        if self.over {
            return Err(EnvError::EpisodeOver);
        }
        if !self.topo.contains(g) {
            return Err(EnvError::UnknownNode(g));
        }
        if !self.state.tree_nodes.contains(&g) {
            self.strikes += 1;
            let truncated = self.strikes >= self.strike_cap;
            self.over |= truncated;
            return Ok(SubgoalOutcome {
                legal: false,
                r_ex: self.cfg.illegal,
                truncated,
            });
        }
        let st = &mut self.state;
        st.position = g;
        st.fork = Some(g);
        st.fork_history.push(g);
        st.walk.clear();
        st.walk_entry.clear();
        Ok(SubgoalOutcome {
            legal: true,
            r_ex: 0.0,
            truncated: false,
        })
    }

    pub fn step(&mut self, a: usize) -> Result<StepOutcome, EnvError> {
        if self.over {
            return Err(EnvError::EpisodeOver);
        }
        let Some(fork) = self.state.fork else {
            return Err(EnvError::NoActiveSubgoal);
        };
        let width = self.topo.max_degree();
        if a >= width {
            return Err(EnvError::ActionOutOfRange { action: a, width });
        }
        self.steps += 1;
        let mut out = StepOutcome {
            scenario: Scenario::None,
            next_state: self.state.clone(),
            r_in: self.cfg.none,
            r_ex: 0.0,
            s_f: false,
            g_f: false,
            truncated: false,
        };
        if let Some((next, id)) = self.action_edge(a) {
            let st = &mut self.state;
            st.marks[id.index()] += 1;
            st.position = next;
            if st.tree.contains(&id) || st.walk.contains(&id) {
                out.scenario = Scenario::Back;
                out.r_in = self.cfg.back;
            } else if st.tree_nodes.contains(&next) || st.walk_entry.contains_key(&next) {
                out.scenario = Scenario::Cycle;
                out.r_in = self.cfg.back;
            } else {
                out.scenario = Scenario::Forward;
                st.walk.insert(id);
                st.walk_entry.insert(next, id);
                if st.remaining.remove(&next) {
                    let r_g = self.complete_subgoal(fork, next)?;
                    out.g_f = true;
                    out.r_in = r_g;
                    out.r_ex = r_g;
                    if self.state.remaining.is_empty() {
                        out.s_f = true;
                        out.r_ex += reward_finish(&self.cfg, self.topo, &self.norm, &self.tree())?;
                        self.over = true;
                    }
                } else {
                    out.r_in = reward_step(&self.cfg, &self.norm[id.index()]);
                }
            }
        }
        if !out.s_f && self.steps >= self.step_cap {
            out.truncated = true;
            self.over = true;
        }
        out.next_state = self.state.clone();
        Ok(out)
    }

    /// Commits the walk branch that joins `dest` to the tree and returns the
    /// goal reward of the fork-to-destination path.
    fn complete_subgoal(&mut self, fork: NodeId, dest: NodeId) -> Result<f64, EnvError> {
        let st = &mut self.state;
        let joined: BTreeSet<EdgeId> = st.tree.union(&st.walk).copied().collect();
        let path = tree_path(self.topo, &joined, fork, dest);
        let r_g = reward_goal(&self.cfg, &self.norm, &path);

        // Walk back from the destination until the committed tree is hit.
        let mut at = dest;
        let mut branch = Vec::new();
        while !st.tree_nodes.contains(&at) {
            let id = st.walk_entry[&at];
            branch.push(id);
            at = self.topo.edge(id).other(at);
        }
        for id in branch {
            let e = self.topo.edge(id);
            st.tree.insert(id);
            st.tree_nodes.insert(e.a);
            st.tree_nodes.insert(e.b);
        }
        for (k, m) in st.marks.iter_mut().enumerate() {
            if !st.tree.contains(&EdgeId(k as u32)) {
                *m = 0;
            }
        }
        st.walk.clear();
        st.walk_entry.clear();
        st.fork = None;
        Ok(r_g)
    }

    /// The committed tree with the full destination set.
    pub fn tree(&self) -> MulticastTree {
        MulticastTree::new(
            self.source,
            self.destinations.iter().copied(),
            self.state.tree.iter().copied(),
        )
    }
}

/// Unique path between two nodes of an acyclic edge set.
fn tree_path(topo: &Topology, edges: &BTreeSet<EdgeId>, from: NodeId, to: NodeId) -> Vec<EdgeId> {
    let mut parent: Vec<Option<(NodeId, EdgeId)>> = vec![None; topo.node_count()];
    let mut seen = vec![false; topo.node_count()];
    seen[from.index()] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &(v, id) in topo.neighbors(u) {
            if edges.contains(&id) && !seen[v.index()] {
                seen[v.index()] = true;
                parent[v.index()] = Some((u, id));
                queue.push_back(v);
            }
        }
    }
    let mut path = Vec::new();
    let mut at = to;
    while let Some((p, id)) = parent[at.index()] {
        path.push(id);
        at = p;
    }
    path.reverse();
    path
}
