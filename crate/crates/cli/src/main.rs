mod commands;
mod config;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Multicast tree construction with a two-level deep Q-learning agent.
#[derive(Parser, Debug)]
#[command(name = "forkroute", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate link-state snapshots for a topology.
    GenNli {
        /// Topology file, or `bundled14` / `fork-example`.
        #[arg(long, default_value = "bundled14")]
        topology: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train both controllers from a run config.
    Train { config: PathBuf },
    /// Greedy tree extraction from a trained checkpoint.
    Extract {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value = "bundled14")]
        topology: String,
        #[arg(long)]
        nli: PathBuf,
        /// Position of the snapshot in the file.
        #[arg(long, default_value_t = 0)]
        snapshot: usize,
    },
    /// Finite-difference check of the network gradients.
    Gradcheck {
        /// `meta` or `intrinsic`.
        #[arg(long, default_value = "meta")]
        net: String,
        #[arg(long, default_value_t = 14)]
        nodes: usize,
        /// Intrinsic output width; defaults to the bundled topology's maximum degree.
        #[arg(long, default_value_t = 7)]
        actions: usize,
        #[arg(long, value_delimiter = ',', default_value = "128,256,128")]
        widths: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        probes: usize,
        #[arg(long, default_value_t = 1e-4)]
        tolerance: f64,
    },
    /// Agent tree against the heuristic and exact baselines on every snapshot.
    Compare {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value = "bundled14")]
        topology: String,
        #[arg(long)]
        nli: PathBuf,
        /// Overrides the checkpoint's source.
        #[arg(long)]
        source: Option<u32>,
        /// Overrides the checkpoint's destinations.
        #[arg(long, value_delimiter = ',')]
        destinations: Option<Vec<u32>>,
        #[arg(long)]
        out: PathBuf,
        /// Also render mean metrics per algorithm as SVG bar charts.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

/// Failure classes mapped to process exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::GenNli {
            topology,
            count,
            seed,
            out,
        } => commands::gen_nli(&topology, count, seed, &out),
        Command::Train { config } => commands::train(&config),
        Command::Extract {
            checkpoint,
            topology,
            nli,
            snapshot,
        } => commands::extract(&checkpoint, &topology, &nli, snapshot),
        Command::Gradcheck {
            net,
            nodes,
            actions,
            widths,
            seed,
            probes,
            tolerance,
        } => commands::gradcheck(&net, nodes, actions, &widths, seed, probes, tolerance),
        Command::Compare {
            checkpoint,
            topology,
            nli,
            source,
            destinations,
            out,
            plot,
        } => commands::compare(
            &checkpoint,
            &topology,
            &nli,
            source,
            destinations,
            &out,
            plot.as_deref(),
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("usage error: {m}"),
                Failure::Data(e) => eprintln!("error: {e:#}"),
                Failure::Verification(m) => eprintln!("verification failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
