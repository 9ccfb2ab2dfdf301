use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use typeparam::estimation::EstimatorKind;
use typeparam::harness::{
    run_batch, write_outputs, Baseline, ExperimentConfig, InitialEstimates, Trace, WorldPreset,
};
use typeparam::selection::SelectionPolicy;

/// Ad hoc teamwork experiments in level-based foraging.
#[derive(Parser)]
#[command(name = "typeparam", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of episodes and write summary.json, per_step.csv and episodes.csv.
    Run(RunArgs),
    /// Re-apply a recorded episode and check it reproduces.
    Replay {
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed of the instance sequence.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    instances: Option<usize>,
    /// none | aga | abu | ego
    #[arg(long)]
    estimator: Option<EstimatorKind>,
    /// all | posterior | ucb1
    #[arg(long)]
    selection: Option<SelectionPolicy>,
    /// 10x10 | 15x15
    #[arg(long)]
    world: Option<WorldPreset>,
    #[arg(long)]
    rollouts: Option<usize>,
    #[arg(long)]
    ego_budget: Option<usize>,
    /// Run a fixed-parameter reference instead: rnd | cor
    #[arg(long, conflicts_with = "estimator")]
    baseline: Option<Baseline>,
    /// random | correct
    #[arg(long)]
    initial: Option<InitialEstimates>,
    #[arg(long)]
    threads: Option<usize>,
    /// Also write one replayable trace per episode.
    #[arg(long)]
    traces: bool,
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = args.instances {
        cfg.instances = v;
    }
    if let Some(v) = args.estimator {
        cfg.estimator = v;
    }
    if let Some(v) = args.selection {
        cfg.selection = v;
    }
    if let Some(v) = args.world {
        cfg.world = v;
    }
    if let Some(v) = args.rollouts {
        cfg.rollouts = Some(v);
    }
    if let Some(v) = args.ego_budget {
        cfg.ego_budget = v;
    }
    if let Some(v) = args.initial {
        cfg.initial = v;
    }
    if let Some(v) = args.threads {
        cfg.threads = Some(v);
    }
    if let Some(b) = args.baseline {
        cfg = cfg.baseline(b);
    }
    cfg.traces |= args.traces;
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = load_config(&args)?;
    let Some(out) = cfg.output.clone() else {
        bail!("no output directory: pass --out or set \"output\" in the config");
    };
    eprintln!(
        "running {} on {} instance(s) of {}",
        cfg.label(),
        cfg.instances,
        if cfg.world == WorldPreset::Small { "10x10" } else { "15x15" }
    );
    let result = run_batch(&cfg)?;
    write_outputs(&out, &cfg, &result)?;
    let s = &result.summary;
    println!("configuration      {}", s.label);
    println!("completion rate    {:.3} ({}/{})", s.completion_rate, s.completed, s.instances);
    if let (Some(m), Some(sd)) = (s.mean_steps_completed, s.std_steps_completed) {
        println!("steps (completed)  {m:.1} ± {sd:.1}");
    }
    println!("final belief       {:.3}", s.mean_final_belief);
    if let Some(t) = s.mean_update_seconds {
        println!("seconds per update {t:.2e}");
    }
    println!("outputs in         {}", out.display());
    Ok(())
}

fn replay(path: PathBuf) -> Result<bool> {
    let trace = Trace::load(&path)?;
    let report = trace.replay()?;
    println!("configuration {}", trace.label);
    println!("steps         {}", report.steps);
    println!("collected     {}/{}", report.collected, trace.instance.world.items.len());
    println!("completed     {}", report.completed);
    println!("consistent    {}", report.consistent);
    Ok(report.consistent)
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run(args) => run(args).map(|_| ExitCode::SUCCESS),
        Command::Replay { trace } => replay(trace).map(|ok| if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE }),
    }
}
