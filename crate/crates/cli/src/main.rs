use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use fishery_core::cli_io::{default_out_dir, load_config, run_subcommand, RunConfig, Subcommand};
use fishery_core::dynamics::ModelId;
use fishery_core::harness::Strategy;

/// Fishery management experiments: simulation, policy tuning, PPO training,
/// GP smoothing and evaluation.
#[derive(Debug, Parser)]
#[command(name = "fishery", version)]
struct Cli {
    /// One of: simulate, bifurcation, tune-cesc, tune-cmort, train-ppo,
    /// smooth-gp, evaluate, tradeoff, project-policy, compare, stability.
    command: String,

    /// TOML run configuration. Without one, the model defaults are used.
    #[arg(short, long, env = "FISHERY_CONFIG")]
    config: Option<PathBuf>,

    /// Model number (1 to 4) when no configuration file is given.
    #[arg(short, long)]
    model: Option<u8>,

    #[arg(short, long)]
    seed: Option<u64>,

    /// Output directory. Defaults to `$FISHERY_OUT_ROOT/<command>-model<N>-seed<S>`.
    #[arg(short, long)]
    out: Option<PathBuf>,

    /// Worker threads.
    #[arg(short, long)]
    jobs: Option<usize>,

    /// Evaluation episodes.
    #[arg(long)]
    episodes: Option<usize>,

    /// PPO iterations.
    #[arg(long)]
    iterations: Option<usize>,

    /// Stored policy file.
    #[arg(long)]
    policy: Option<PathBuf>,

    /// Strategy to prepare when no policy file is given (cesc, cmort, ppo, ppo_gp).
    #[arg(long)]
    strategy: Option<Strategy>,

    /// Perturbation samples per strength for `stability`.
    #[arg(long)]
    samples: Option<usize>,

    /// Also write per-step trajectories.
    #[arg(long)]
    trajectories: bool,
}

fn resolve(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = load_config(path)?;
            if let Some(m) = cli.model {
                if m != cfg.model.number() {
                    bail!("--model {m} conflicts with model {} in {}", cfg.model.number(), path.display());
                }
            }
            cfg
        }
        None => {
            let model = ModelId::try_from(cli.model.unwrap_or(1)).map_err(anyhow::Error::msg)?;
            RunConfig::for_model(model, 0)
        }
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = Some(j);
    }
    if let Some(n) = cli.episodes {
        cfg.eval.n_episodes = n;
    }
    if let Some(n) = cli.iterations {
        cfg.train.iterations = n;
        cfg.stability.iterations = n;
        cfg.compare.iterations = Some(n);
    }
    if let Some(p) = &cli.policy {
        cfg.policy = Some(p.clone());
    }
    if let Some(s) = cli.strategy {
        cfg.strategy = Some(s);
    }
    if let Some(n) = cli.samples {
        cfg.stability.n_samples = n;
    }
    if cli.trajectories {
        cfg.eval.trajectories = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cmd: Subcommand = cli.command.parse()?;
    let cfg = resolve(&cli)?;
    if let Some(j) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("configuring worker threads")?;
    }
    let out = cfg.out.clone().unwrap_or_else(|| default_out_dir(cmd, &cfg));
    log::info!("{cmd}: model {} seed {} -> {}", cfg.model.number(), cfg.seed, out.display());
    let manifest = run_subcommand(cmd, &cfg, &out)?;
    for f in &manifest.files {
        println!("{}", out.join(&f.path).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
