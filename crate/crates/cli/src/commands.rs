use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use forkroute::agent::{
    extract_tree, train_observed, AgentCheckpoint, AgentError, Extraction, Task,
};
use forkroute::graph::{
    bundled14, fork_example, tree_metrics, MulticastTree, NliSnapshot, NodeId, Topology,
};
use forkroute::nli::{generate_snapshots, load_snapshots, save_snapshots, SimConfig};
use forkroute::nn::{gradcheck as run_gradcheck, GradcheckConfig, NetworkSpec};
use forkroute::steiner::{Algorithm, EdgeWeights, Weighting};

use crate::config::RunConfig;
use crate::plot;
use crate::Failure;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

type CmdResult = Result<(), Failure>;

fn load_topology(name: &str) -> Result<Topology, Failure> {
    match name {
        "bundled14" => Ok(bundled14()),
        "fork-example" => Ok(fork_example()),
        path => Topology::load(path)
            .with_context(|| format!("loading topology {path}"))
            .map_err(Failure::Data),
    }
}

fn load_nli(path: &Path, topo: &Topology) -> Result<Vec<NliSnapshot>, Failure> {
    load_snapshots(path, topo)
        .with_context(|| format!("loading snapshots {}", path.display()))
        .map_err(Failure::Data)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Data)
}

pub fn gen_nli(topology: &str, count: usize, seed: u64, out: &Path) -> CmdResult {
    if count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let topo = load_topology(topology)?;
    let snaps = generate_snapshots(&topo, count, seed, &SimConfig::default())
        .map_err(|e| Failure::Data(e.into()))?;
    save_snapshots(out, &topo, &snaps).with_context(|| format!("writing {}", out.display()))?;
    for s in &snaps {
        let links = s.links();
        let k = links.len() as f64;
        println!(
            "snapshot {}: mean bw {:.3} Mbps, min bw {:.3}, mean delay {:.3} ms, mean loss {:.5}",
            s.id,
            links.iter().map(|l| l.bw).sum::<f64>() / k,
            links.iter().map(|l| l.bw).fold(f64::INFINITY, f64::min),
            links.iter().map(|l| l.delay).sum::<f64>() / k,
            links.iter().map(|l| l.loss).sum::<f64>() / k,
        );
    }
    println!("wrote {} snapshots to {}", snaps.len(), out.display());
    Ok(())
}

pub fn train(config_path: &Path) -> CmdResult {
    if !config_path.exists() {
        return Err(Failure::Data(anyhow!(
            "config {} not found",
            config_path.display()
        )));
    }
    let cfg = RunConfig::load(config_path).map_err(|e| Failure::Usage(format!("{e:#}")))?;
    let train_cfg = cfg.train_config();
    train_cfg
        .validate()
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let topo = load_topology(&cfg.topology)?;
    let snaps = match &cfg.nli {
        Some(path) => load_nli(path, &topo)?,
        None => generate_snapshots(
            &topo,
            cfg.generate.count,
            cfg.generate.seed,
            &SimConfig::default(),
        )
        .map_err(|e| Failure::Usage(e.to_string()))?,
    };
    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    let echo = format!("# forkroute {VERSION}\n{}", cfg.echo());
    write(&cfg.out_dir.join("config.toml"), &echo)?;

    let every = (train_cfg.episodes / 20).max(1);
    let outcome = train_observed(&train_cfg, &topo, &snaps, &cfg.task(), |r| {
        if (r.episode + 1) % every == 0 {
            eprintln!(
                "episode {}/{}: r_in {:.4} r_ex {:.4} eps {:.3} completed {}/{}",
                r.episode + 1,
                train_cfg.episodes,
                r.intrinsic_reward,
                r.meta_reward,
                r.eps_intrinsic,
                r.completed,
                snaps.len()
            );
        }
    });
    let outcome = match outcome {
        Ok(o) => o,
        Err(AgentError::Diverged {
            episode,
            controller,
            detail,
            checkpoint,
        }) => {
            let path = cfg.out_dir.join("diverged.ckpt");
            checkpoint
                .save(&path)
                .map_err(|e| Failure::Data(e.into()))?;
            return Err(Failure::Data(anyhow!(
                "{controller} controller diverged in episode {episode}: {detail}; parameters saved to {}",
                path.display()
            )));
        }
        Err(e @ (AgentError::InvalidConfig(_) | AgentError::Env(_))) => {
            return Err(Failure::Usage(e.to_string()))
        }
        Err(e) => return Err(Failure::Data(e.into())),
    };
    let ckpt = cfg.out_dir.join("checkpoint.bin");
    outcome
        .checkpoint
        .save(&ckpt)
        .map_err(|e| Failure::Data(e.into()))?;
    write(&cfg.out_dir.join("train.csv"), outcome.report.to_csv())?;
    let summary = format!(
        "forkroute {VERSION}\n{}\n[config]\n{}",
        outcome.report.summary(),
        cfg.echo()
    );
    write(&cfg.out_dir.join("summary.txt"), &summary)?;
    print!("{}", outcome.report.summary());
    println!("checkpoint: {}", ckpt.display());
    Ok(())
}

fn load_checkpoint(path: &Path, topo: &Topology) -> Result<AgentCheckpoint, Failure> {
    let ckpt = AgentCheckpoint::load(path).map_err(|e| Failure::Data(e.into()))?;
    ckpt.check_topology(topo)
        .map_err(|e| Failure::Data(e.into()))?;
    Ok(ckpt)
}

fn edge_list(topo: &Topology, tree: &MulticastTree) -> String {
    tree.edges
        .iter()
        .map(|&id| {
            let e = topo.edge(id);
            format!("{}-{}", e.a, e.b)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn extract(checkpoint: &Path, topology: &str, nli: &Path, index: usize) -> CmdResult {
    let topo = load_topology(topology)?;
    let ckpt = load_checkpoint(checkpoint, &topo)?;
    let snaps = load_nli(nli, &topo)?;
    let snap = snaps.get(index).ok_or_else(|| {
        Failure::Usage(format!(
            "snapshot {index} out of range (file holds {})",
            snaps.len()
        ))
    })?;
    match extract_tree(&ckpt.policies, &topo, snap, &ckpt.task)
        .map_err(|e| Failure::Data(e.into()))?
    {
        Extraction::Tree(tree) => {
            let m = tree_metrics(&topo, &tree, snap).map_err(|e| Failure::Data(e.into()))?;
            println!("edges: {}", edge_list(&topo, &tree));
            println!(
                "bw_tree {:.6}  delay_tree {:.6}  loss_tree {:.6}  length {}",
                m.bw_tree, m.delay_tree, m.loss_tree, m.length
            );
            Ok(())
        }
        Extraction::Failed(f) => {
            println!("partial edges: {}", edge_list(&topo, &f.partial));
            Err(Failure::Verification(format!(
                "extraction failed after {} steps: {}",
                f.steps, f.reason
            )))
        }
    }
}

pub fn gradcheck(
    net: &str,
    nodes: usize,
    actions: usize,
    widths: &[usize],
    seed: u64,
    probes: usize,
    tolerance: f64,
) -> CmdResult {
    let spec = match net {
        "meta" => NetworkSpec::meta(nodes),
        "intrinsic" => NetworkSpec::intrinsic(nodes, actions),
        other => {
            return Err(Failure::Usage(format!(
                "unknown network `{other}`, expected meta or intrinsic"
            )))
        }
    }
    .with_conv_widths(widths);
    spec.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let cfg = GradcheckConfig {
        probes_per_layer: probes,
        tolerance,
        seed,
        ..GradcheckConfig::default()
    };
    let report = run_gradcheck(&spec, &cfg).map_err(|e| Failure::Data(e.into()))?;
    for layer in &report.layers {
        println!(
            "{:<6} probes {:>4}  max relative error {:.3e}  resampled {}",
            layer.name, layer.probes, layer.max_rel_error, layer.resampled
        );
    }
    if report.passed() {
        println!("gradient check passed at tolerance {tolerance:e}");
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "relative error above {tolerance:e}"
        )))
    }
}

/// One algorithm's outcome on one snapshot.
struct Row {
    snapshot: u32,
    algorithm: String,
    metrics: Result<(forkroute::graph::TreeMetrics, f64), String>,
}

const BASELINES: [(&str, Algorithm, Weighting); 6] = [
    ("kmb_bw", Algorithm::Kmb, Weighting::Bandwidth),
    ("kmb_delay", Algorithm::Kmb, Weighting::Delay),
    ("kmb_loss", Algorithm::Kmb, Weighting::Loss),
    ("mph", Algorithm::Mph, Weighting::EVEN),
    ("adh", Algorithm::Adh, Weighting::EVEN),
    ("exact", Algorithm::Exact, Weighting::EVEN),
];

pub fn compare(
    checkpoint: &Path,
    topology: &str,
    nli: &Path,
    source: Option<u32>,
    destinations: Option<Vec<u32>>,
    out: &Path,
    plot_path: Option<&Path>,
) -> CmdResult {
    let topo = load_topology(topology)?;
    let ckpt = load_checkpoint(checkpoint, &topo)?;
    let snaps = load_nli(nli, &topo)?;
    let task = Task {
        source: source.map(NodeId).unwrap_or(ckpt.task.source),
        destinations: destinations
            .map(|d| d.into_iter().map(NodeId).collect())
            .unwrap_or_else(|| ckpt.task.destinations.clone()),
    };

    let mut rows = Vec::new();
    for snap in &snaps {
        let scalar = EdgeWeights::from_snapshot(&topo, snap, Weighting::EVEN)
            .map_err(|e| Failure::Data(e.into()))?;
        let measure = |tree: &MulticastTree| -> Result<_, String> {
            let m = tree_metrics(&topo, tree, snap).map_err(|e| e.to_string())?;
            Ok((m, scalar.cost(tree)))
        };
        let agent = match extract_tree(&ckpt.policies, &topo, snap, &task) {
            Ok(Extraction::Tree(t)) => measure(&t),
            Ok(Extraction::Failed(f)) => Err(format!("extraction failed: {}", f.reason)),
            Err(e @ AgentError::Env(_)) => return Err(Failure::Usage(e.to_string())),
            Err(e) => Err(e.to_string()),
        };
        rows.push(Row {
            snapshot: snap.id,
            algorithm: "agent".into(),
            metrics: agent,
        });
        for (name, alg, weighting) in BASELINES {
            let metrics = EdgeWeights::from_snapshot(&topo, snap, weighting)
                .map_err(|e| e.to_string())
                .and_then(|w| {
                    alg.run(&topo, &w, task.source, &task.destinations)
                        .map_err(|e| e.to_string())
                })
                .and_then(|t| measure(&t));
            rows.push(Row {
                snapshot: snap.id,
                algorithm: name.into(),
                metrics,
            });
        }
    }

    let mut csv =
        String::from("snapshot,algorithm,bw_tree,delay_tree,loss_tree,length,scalar_cost,status\n");
    for r in &rows {
        match &r.metrics {
            Ok((m, cost)) => writeln!(
                csv,
                "{},{},{},{},{},{},{},ok",
                r.snapshot, r.algorithm, m.bw_tree, m.delay_tree, m.loss_tree, m.length, cost
            ),
            Err(e) => writeln!(
                csv,
                "{},{},,,,,,{}",
                r.snapshot,
                r.algorithm,
                e.replace(',', ";")
            ),
        }
        .unwrap();
    }
    write(out, &csv)?;

    let summary = summarize(&rows, &task, checkpoint, nli);
    print!("{summary}");
    write(&out.with_extension("summary.txt"), &summary)?;
    if let Some(p) = plot_path {
        let names: Vec<String> = std::iter::once("agent".to_string())
            .chain(BASELINES.iter().map(|b| b.0.to_string()))
            .collect();
        let series: Vec<plot::Bar> = names
            .iter()
            .map(|n| means(&rows, n))
            .map(|(name, m)| plot::Bar { name, values: m })
            .collect();
        write(
            p,
            plot::bar_panels(&["bw_tree", "delay_tree", "loss_tree"], &series),
        )?;
    }
    Ok(())
}

/// Mean `(bw, delay, loss)` over the snapshots where `name` produced a tree.
fn means(rows: &[Row], name: &str) -> (String, [Option<f64>; 3]) {
    let ok: Vec<_> = rows
        .iter()
        .filter(|r| r.algorithm == name)
        .filter_map(|r| r.metrics.as_ref().ok())
        .collect();
    let k = ok.len() as f64;
    let mean = |f: &dyn Fn(&forkroute::graph::TreeMetrics) -> f64| {
        (!ok.is_empty()).then(|| ok.iter().map(|(m, _)| f(m)).sum::<f64>() / k)
    };
    (
        name.to_string(),
        [
            mean(&|m| m.bw_tree),
            mean(&|m| m.delay_tree),
            mean(&|m| m.loss_tree),
        ],
    )
}

fn summarize(rows: &[Row], task: &Task, checkpoint: &Path, nli: &Path) -> String {
    let mut out = String::new();
    writeln!(out, "forkroute {VERSION}").unwrap();
    writeln!(
        out,
        "checkpoint {}  snapshots {}",
        checkpoint.display(),
        nli.display()
    )
    .unwrap();
    writeln!(
        out,
        "source {}  destinations {:?}",
        task.source,
        task.destinations.iter().map(|d| d.0).collect::<Vec<_>>()
    )
    .unwrap();
    let failed = rows
        .iter()
        .filter(|r| r.algorithm == "agent" && r.metrics.is_err())
        .count();
    if failed > 0 {
        writeln!(out, "agent extraction failed on {failed} snapshot(s)").unwrap();
    }
    for (name, _, _) in BASELINES {
        // Paired comparison over snapshots where both sides produced a tree.
        let mut sums = [0.0; 6];
        let mut k = 0usize;
        for pair in rows.chunks(BASELINES.len() + 1) {
            let agent = pair
                .iter()
                .find(|r| r.algorithm == "agent")
                .and_then(|r| r.metrics.as_ref().ok());
            let base = pair
                .iter()
                .find(|r| r.algorithm == name)
                .and_then(|r| r.metrics.as_ref().ok());
            if let (Some((a, _)), Some((b, _))) = (agent, base) {
                let vals = [
                    a.bw_tree,
                    b.bw_tree,
                    a.delay_tree,
                    b.delay_tree,
                    a.loss_tree,
                    b.loss_tree,
                ];
                for (s, v) in sums.iter_mut().zip(vals) {
                    *s += v;
                }
                k += 1;
            }
        }
        if k == 0 {
            writeln!(out, "vs {name}: no paired snapshots").unwrap();
            continue;
        }
        let pct = |a: f64, b: f64| {
            if b == 0.0 {
                f64::NAN
            } else {
                100.0 * (a - b) / b
            }
        };
        writeln!(
            out,
            "vs {name} ({k} snapshots): bw_tree {:+.2}%  delay_tree {:+.2}%  loss_tree {:+.2}%",
            pct(sums[0], sums[1]),
            pct(sums[2], sums[3]),
            pct(sums[4], sums[5])
        )
        .unwrap();
    }
    out
}
