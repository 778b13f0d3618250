use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use forkroute::agent::{EpsilonSchedule, Task, TrainConfig};
use forkroute::env::RewardConfig;
use forkroute::per::PerConfig;
use serde::{Deserialize, Serialize};

/// File-backed description of a training run. Every field except the task
/// has a default; unknown keys are errors.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Topology file, or `bundled14` / `fork-example` for the built-ins.
    #[serde(default = "default_topology")]
    pub topology: String,
    /// Snapshot file. When absent, snapshots are simulated from `[generate]`.
    #[serde(default)]
    pub nli: Option<PathBuf>,
    #[serde(default)]
    pub generate: GenerateSection,
    pub source: u32,
    pub destinations: Vec<u32>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub reward: RewardSection,
    #[serde(default)]
    pub intrinsic_replay: ReplaySection,
    #[serde(default)]
    pub meta_replay: ReplaySection,
}

fn default_topology() -> String {
    "bundled14".into()
}

fn default_out_dir() -> PathBuf {
    "run".into()
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateSection {
    pub count: usize,
    pub seed: u64,
}

impl Default for GenerateSection {
    fn default() -> Self {
        GenerateSection { count: 1, seed: 0 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsilonSection {
    pub start: f64,
    pub end: f64,
    pub decay: f64,
}

impl Default for EpsilonSection {
    fn default() -> Self {
        let d = EpsilonSchedule::default();
        EpsilonSection {
            start: d.start,
            end: d.end,
            decay: d.decay,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub episodes: usize,
    pub gamma: f64,
    pub lr: f64,
    pub batch: usize,
    pub target_sync: u64,
    pub seed: u64,
    pub conv_widths: Vec<usize>,
    pub step_cap: Option<usize>,
    pub strike_cap: Option<usize>,
    pub force_source_subgoal: bool,
    pub meta_epsilon: EpsilonSection,
    pub intrinsic_epsilon: EpsilonSection,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainSection {
            episodes: d.episodes,
            gamma: d.gamma,
            lr: d.lr,
            batch: d.batch,
            target_sync: d.target_sync,
            seed: d.seed,
            conv_widths: d.conv_widths,
            step_cap: d.step_cap,
            strike_cap: d.strike_cap,
            force_source_subgoal: d.force_source_subgoal,
            meta_epsilon: EpsilonSection::default(),
            intrinsic_epsilon: EpsilonSection::default(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RewardSection {
    pub beta: [f64; 3],
    pub step_ratio: f64,
    pub illegal: f64,
    pub none: f64,
    pub back: f64,
}

impl Default for RewardSection {
    fn default() -> Self {
        let d = RewardConfig::default();
        RewardSection {
            beta: d.beta,
            step_ratio: d.step_ratio,
            illegal: d.illegal,
            none: d.none,
            back: d.back,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReplaySection {
    pub capacity: usize,
    pub alpha: f64,
    pub beta_start: f64,
    pub beta_end: f64,
    pub eps: f64,
}

impl Default for ReplaySection {
    fn default() -> Self {
        let d = PerConfig::default();
        ReplaySection {
            capacity: d.capacity,
            alpha: d.alpha,
            beta_start: d.beta_start,
            beta_end: d.beta_end,
            eps: d.eps,
        }
    }
}

impl From<&ReplaySection> for PerConfig {
    fn from(r: &ReplaySection) -> Self {
        PerConfig {
            capacity: r.capacity,
            alpha: r.alpha,
            beta_start: r.beta_start,
            beta_end: r.beta_end,
            eps: r.eps,
        }
    }
}

fn schedule(e: &EpsilonSection) -> EpsilonSchedule {
    EpsilonSchedule {
        start: e.start,
        end: e.end,
        decay: e.decay,
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        if cfg.destinations.is_empty() {
            bail!("`destinations` must not be empty");
        }
        Ok(cfg)
    }

    /// Loads a config and resolves relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if !is_builtin(&cfg.topology) && Path::new(&cfg.topology).is_relative() {
            cfg.topology = base.join(&cfg.topology).to_string_lossy().into_owned();
        }
        if let Some(nli) = &cfg.nli {
            if nli.is_relative() {
                cfg.nli = Some(base.join(nli));
            }
        }
        if cfg.out_dir.is_relative() {
            cfg.out_dir = base.join(&cfg.out_dir);
        }
        Ok(cfg)
    }

    pub fn task(&self) -> Task {
        Task::new(self.source, &self.destinations)
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        let r = &self.reward;
        TrainConfig {
            episodes: t.episodes,
            gamma: t.gamma,
            lr: t.lr,
            batch: t.batch,
            target_sync: t.target_sync,
            meta_epsilon: schedule(&t.meta_epsilon),
            intrinsic_epsilon: schedule(&t.intrinsic_epsilon),
            seed: t.seed,
            reward: RewardConfig {
                beta: r.beta,
                step_ratio: r.step_ratio,
                illegal: r.illegal,
                none: r.none,
                back: r.back,
            },
            intrinsic_replay: (&self.intrinsic_replay).into(),
            meta_replay: (&self.meta_replay).into(),
            conv_widths: t.conv_widths.clone(),
            step_cap: t.step_cap,
            strike_cap: t.strike_cap,
            force_source_subgoal: t.force_source_subgoal,
        }
    }

    /// Fully resolved config as TOML, defaults included.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

pub fn is_builtin(name: &str) -> bool {
    matches!(name, "bundled14" | "fork-example")
}
