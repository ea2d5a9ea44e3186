//! Subcommands: each wraps one experiment and writes its data files plus a
//! manifest into the output directory.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::histogram::emit_histogram_data;
use super::output::{cell, now_rfc3339, sha256_hex, FileHeader, OutputDir, RunManifest, CODE_VERSION};
use crate::dynamics::{fixed_points_model1, ModelId, ModelParams, ModelSpec, ThreeSpeciesParams, SPECIES_NAMES};
use crate::error::{Error, Result};
use crate::gp_smooth::{popular_window, smooth_policy, GridSample};
use crate::harness::{
    comparison_matrix, evaluate, evaluate_with_trajectories, mortality_tradeoff, policy_projection_with,
    species_axis, stability_analysis, tune_cesc, tune_cmort, EvalSummary, PipelineOptions,
    StageSeeds, Strategy, Trajectory, TuneReport,
};
use crate::policy::PolicySpec;
use crate::ppo::{train, TrainConfig};

/// Environment variable naming the default output root.
pub const OUT_ROOT_ENV: &str = "FISHERY_OUT_ROOT";
pub const DEFAULT_OUT_ROOT: &str = "runs";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subcommand {
    Simulate,
    Bifurcation,
    TuneCesc,
    TuneCmort,
    TrainPpo,
    SmoothGp,
    Evaluate,
    Tradeoff,
    ProjectPolicy,
    Compare,
    Stability,
}

impl Subcommand {
    pub const ALL: [Subcommand; 11] = [
        Subcommand::Simulate,
        Subcommand::Bifurcation,
        Subcommand::TuneCesc,
        Subcommand::TuneCmort,
        Subcommand::TrainPpo,
        Subcommand::SmoothGp,
        Subcommand::Evaluate,
        Subcommand::Tradeoff,
        Subcommand::ProjectPolicy,
        Subcommand::Compare,
        Subcommand::Stability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Simulate => "simulate",
            Subcommand::Bifurcation => "bifurcation",
            Subcommand::TuneCesc => "tune-cesc",
            Subcommand::TuneCmort => "tune-cmort",
            Subcommand::TrainPpo => "train-ppo",
            Subcommand::SmoothGp => "smooth-gp",
            Subcommand::Evaluate => "evaluate",
            Subcommand::Tradeoff => "tradeoff",
            Subcommand::ProjectPolicy => "project-policy",
            Subcommand::Compare => "compare",
            Subcommand::Stability => "stability",
        }
    }
}

impl std::str::FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownSubcommand(s.to_string()))
    }
}

impl std::fmt::Display for Subcommand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Output directory used when the config names none:
/// `$FISHERY_OUT_ROOT/<subcommand>-model<N>-seed<S>` (root defaults to
/// `runs`).
pub fn default_out_dir(cmd: Subcommand, cfg: &RunConfig) -> PathBuf {
    let root = std::env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT));
    root.join(format!("{}-model{}-seed{}", cmd.name(), cfg.model.number(), cfg.seed))
}

/// Digest of the resolved configuration, ignoring settings that do not
/// affect results (output location and thread count).
pub fn config_hash(cfg: &RunConfig) -> Result<String> {
    Ok(sha256_hex(portable_toml(cfg)?.as_bytes()))
}

fn portable_toml(cfg: &RunConfig) -> Result<String> {
    let mut c = cfg.clone();
    c.out = None;
    c.jobs = None;
    c.to_toml_string()
}

fn species_header(spec: &ModelSpec, prefix: &str) -> Vec<String> {
    SPECIES_NAMES[..spec.dim()].iter().map(|s| format!("{prefix}{s}")).collect()
}

fn harvest_header(spec: &ModelSpec, prefix: &str) -> Vec<String> {
    spec.harvested.iter().map(|&i| format!("{prefix}{}", SPECIES_NAMES[i])).collect()
}

fn cells(xs: &[f64]) -> Vec<String> {
    xs.iter().map(|&x| cell(x)).collect()
}

fn strs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Runs `cmd` with `cfg`, writing into `out_dir`. Returns the manifest.
pub fn run_subcommand(cmd: Subcommand, cfg: &RunConfig, out_dir: &Path) -> Result<RunManifest> {
    cfg.validate()?;
    let started = now_rfc3339();
    let toml = portable_toml(cfg)?;
    let header = FileHeader {
        subcommand: cmd.name().to_string(),
        config_hash: sha256_hex(toml.as_bytes()),
        seed: cfg.seed,
        version: CODE_VERSION.to_string(),
    };
    let mut out = OutputDir::create(out_dir, header)?;
    out.write_text("config.toml", &toml)?;
    let spec = cfg.model_spec()?;
    match cmd {
        Subcommand::Simulate => simulate(cfg, &spec, &mut out)?,
        Subcommand::Bifurcation => bifurcation(cfg, &spec, &mut out)?,
        Subcommand::TuneCesc => {
            let rep = tune_cesc(&spec, &cfg.tune, StageSeeds::from_root(cfg.seed).tune)?;
            write_tune(&spec, &rep, &mut out)?;
        }
        Subcommand::TuneCmort => {
            let rep = tune_cmort(&spec, &cfg.tune, StageSeeds::from_root(cfg.seed).tune)?;
            write_tune(&spec, &rep, &mut out)?;
        }
        Subcommand::TrainPpo => train_ppo(cfg, &spec, &mut out)?,
        Subcommand::SmoothGp => smooth_gp(cfg, &spec, &mut out)?,
        Subcommand::Evaluate => {
            let policy = resolve_policy(cfg, &spec, false)?;
            write_evaluation(cfg, &spec, &policy, &mut out)?;
        }
        Subcommand::Tradeoff => tradeoff(cfg, &spec, &mut out)?,
        Subcommand::ProjectPolicy => project(cfg, &spec, &mut out)?,
        Subcommand::Compare => compare(cfg, &mut out)?,
        Subcommand::Stability => stability(cfg, &spec, &mut out)?,
    }
    out.finish(&toml, started)
}

/// The policy to act with: the stored file if one is configured, otherwise
/// one prepared for the configured strategy. With neither, `allow_idle`
/// selects the no-harvest policy.
fn resolve_policy(cfg: &RunConfig, spec: &ModelSpec, allow_idle: bool) -> Result<PolicySpec> {
    if let Some(path) = &cfg.policy {
        let p = PolicySpec::load(path)?;
        p.check_compatible(spec)?;
        return Ok(p);
    }
    let seeds = StageSeeds::from_root(cfg.seed);
    match cfg.strategy {
        Some(Strategy::ConstantEscapement) => Ok(tune_cesc(spec, &cfg.tune, seeds.tune)?.best_policy()),
        Some(Strategy::ConstantMortality) => Ok(tune_cmort(spec, &cfg.tune, seeds.tune)?.best_policy()),
        Some(Strategy::Ppo) => {
            let (params, _) = train(spec, &train_config(cfg), |_, _| Ok(()))?;
            Ok(PolicySpec::Mlp {
                obs_bounds: spec.obs_bounds.clone(),
                params,
            })
        }
        Some(Strategy::PpoGp) => {
            let (params, _) = train(spec, &train_config(cfg), |_, _| Ok(()))?;
            Ok(smooth_policy(spec, &spec.obs_bounds, &params, &cfg.smooth, seeds.window)?.policy)
        }
        None if allow_idle => Ok(PolicySpec::ConstantMortality {
            mortality: vec![0.0; spec.n_actions()],
        }),
        None => Err(Error::InvalidArgument(
            "this subcommand needs a policy file (`policy`) or a `strategy`".into(),
        )),
    }
}

fn train_config(cfg: &RunConfig) -> TrainConfig {
    TrainConfig {
        seed: StageSeeds::from_root(cfg.seed).train,
        ..cfg.train.clone()
    }
}

#[derive(Serialize)]
struct StepLine<'a> {
    episode: usize,
    t: usize,
    pops: &'a [f64],
    action: &'a [f64],
    reward: f64,
}

fn write_trajectories_gz(out: &mut OutputDir, trajs: &[Trajectory]) -> Result<()> {
    let lines = trajs.iter().enumerate().flat_map(|(episode, tr)| {
        tr.steps.iter().map(move |s| StepLine {
            episode,
            t: s.state_before.t,
            pops: &s.state_before.pops,
            action: &s.action,
            reward: s.reward(),
        })
    });
    out.write_jsonl_gz("trajectories.jsonl.gz", lines)
}

fn simulate(cfg: &RunConfig, spec: &ModelSpec, out: &mut OutputDir) -> Result<()> {
    let policy = resolve_policy(cfg, spec, true)?;
    let eval_seed = StageSeeds::from_root(cfg.seed).eval;
    let (summary, trajs) = evaluate_with_trajectories(spec, &policy, cfg.eval.n_episodes, eval_seed)?;
    let mut headers = strs(&["episode", "t"]);
    headers.extend(species_header(spec, ""));
    headers.extend(harvest_header(spec, "mortality_"));
    headers.extend(strs(&["harvest", "penalty", "reward", "terminated", "cause"]));
    let rows = trajs.iter().enumerate().flat_map(|(ep, tr)| {
        tr.steps.iter().map(move |s| {
            let mut row = vec![ep.to_string(), s.state_before.t.to_string()];
            row.extend(cells(&s.state_before.pops));
            row.extend(cells(&s.action));
            row.extend([
                cell(s.harvest_reward),
                cell(s.penalty),
                cell(s.reward()),
                s.terminated.to_string(),
                s.cause.label(),
            ]);
            row
        })
    });
    out.write_csv("trajectories.csv", &headers, rows)?;
    write_bounds(spec, out)?;
    write_summary(&policy, &summary, out)?;
    if cfg.eval.trajectories {
        write_trajectories_gz(out, &trajs)?;
    }
    Ok(())
}

fn write_bounds(spec: &ModelSpec, out: &mut OutputDir) -> Result<()> {
    let rows = (0..spec.dim()).map(|i| {
        vec![
            SPECIES_NAMES[i].to_string(),
            cell(spec.obs_bounds[i]),
            cell(spec.thresholds[i]),
            cell(spec.initial_state[i]),
        ]
    });
    out.write_csv("bounds.csv", &strs(&["species", "obs_bound", "threshold", "initial"]), rows)
}

fn bifurcation(cfg: &RunConfig, spec: &ModelSpec, out: &mut OutputDir) -> Result<()> {
    let ModelParams::SingleSpecies(p) = &spec.params else {
        return Err(Error::InvalidArgument("bifurcation is defined for model 1 only".into()));
    };
    let rows = fixed_points_model1(p, &cfg.bifurcation.grid())?;
    let eq_rows = rows.iter().flat_map(|r| {
        r.equilibria.iter().map(move |e| {
            vec![cell(r.beta_h), r.equilibria.len().to_string(), cell(e.x), e.stable.to_string()]
        })
    });
    out.write_csv("bifurcation.csv", &strs(&["beta_h", "n_equilibria", "x", "stable"]), eq_rows)?;
    let counts = rows.iter().map(|r| vec![cell(r.beta_h), r.equilibria.len().to_string()]);
    out.write_csv("counts.csv", &strs(&["beta_h", "n_equilibria"]), counts)
}

fn write_tune(spec: &ModelSpec, rep: &TuneReport, out: &mut OutputDir) -> Result<()> {
    let mut headers = harvest_header(spec, "");
    headers.extend(strs(&["mean_reward", "std_reward", "full_horizon_fraction", "on_ridge"]));
    let ridge: std::collections::HashSet<usize> = rep.ridge.iter().copied().collect();
    let rows = rep.points.iter().enumerate().map(|(i, p)| {
        let mut row = cells(&p.coords);
        row.extend([
            cell(p.mean_reward),
            cell(p.std_reward),
            cell(p.full_horizon_fraction),
            ridge.contains(&i).to_string(),
        ]);
        row
    });
    out.write_csv("grid.csv", &headers, rows)?;
    let best = rep.best_point();
    let mut bh = harvest_header(spec, "best_");
    bh.extend(strs(&["mean_reward", "std_reward", "full_horizon_fraction", "ridge_size", "ridge_connected"]));
    let mut row = cells(&best.coords);
    row.extend([
        cell(best.mean_reward),
        cell(best.std_reward),
        cell(best.full_horizon_fraction),
        rep.ridge.len().to_string(),
        rep.ridge_is_connected().to_string(),
    ]);
    out.write_csv("best.csv", &bh, [row])?;
    out.write_text("policy.json", &rep.best_policy().to_json()?)
}

fn train_ppo(cfg: &RunConfig, spec: &ModelSpec, out: &mut OutputDir) -> Result<()> {
    let tc = train_config(cfg);
    let bounds = spec.obs_bounds.clone();
    let (params, curve) = train(spec, &tc, |it, p| {
        let policy = PolicySpec::Mlp {
            obs_bounds: bounds.clone(),
            params: p.clone(),
        };
        out.write_text(&format!("checkpoints/checkpoint_{it:04}.json"), &policy.to_json()?)
    })?;
    let headers = strs(&[
        "iteration",
        "mean_return",
        "mean_length",
        "episodes",
        "surrogate",
        "value_loss",
        "entropy",
        "approx_kl",
        "clip_fraction",
    ]);
    let rows = curve.rows.iter().map(|r| {
        vec![
            r.iteration.to_string(),
            cell(r.mean_return),
            cell(r.mean_length),
            r.episodes.to_string(),
            cell(r.surrogate),
            cell(r.value_loss),
            cell(r.entropy),
            cell(r.approx_kl),
            cell(r.clip_fraction),
        ]
    });
    out.write_csv("curve.csv", &headers, rows)?;
    let policy = PolicySpec::Mlp {
        obs_bounds: spec.obs_bounds.clone(),
        params,
    };
    out.write_text("policy.json", &policy.to_json()?)
}

fn smooth_gp(cfg: &RunConfig, spec: &ModelSpec, out: &mut OutputDir) -> Result<()> {
    let policy = match cfg.strategy {
        Some(Strategy::Ppo | Strategy::PpoGp) if cfg.policy.is_none() => {
            resolve_policy(&RunConfig { strategy: Some(Strategy::Ppo), ..cfg.clone() }, spec, false)?
        }
        _ => resolve_policy(cfg, spec, false)?,
    };
    let PolicySpec::Mlp { obs_bounds, params } = &policy else {
        return Err(Error::InvalidArgument(format!(
            "smooth-gp needs a neural policy, got {}",
            policy.family()
        )));
    };
    let sm = smooth_policy(spec, obs_bounds, params, &cfg.smooth, StageSeeds::from_root(cfg.seed).window)?;
    write_windows(&sm.windows, out)?;
    let gp = match &sm.policy {
        PolicySpec::Gp { gp, .. } => gp,
        _ => unreachable!("smooth_policy returns a gp policy"),
    };
    write_scatter(spec, &sm.samples, |x| gp.predict(x), out)?;
    out.write_text("policy_gp.json", &sm.policy.to_json()?)
}

fn write_windows(windows: &[crate::gp_smooth::PopularWindow], out: &mut OutputDir) -> Result<()> {
    let rows = windows
        .iter()
        .enumerate()
        .map(|(i, w)| vec![SPECIES_NAMES[i].to_string(), cell(w.lo), cell(w.hi)]);
    out.write_csv("windows.csv", &strs(&["species", "lo", "hi"]), rows)
}

fn write_scatter<F>(spec: &ModelSpec, samples: &[GridSample], smooth: F, out: &mut OutputDir) -> Result<()>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let mut headers = vec!["dense_axis".to_string()];
    headers.extend(species_header(spec, ""));
    headers.extend(strs(&["species", "mortality", "smoothed_mortality"]));
    let mut rows = Vec::new();
    for s in samples {
        let sm = smooth(&s.point)?;
        for (k, &species) in spec.harvested.iter().enumerate() {
            let mut row = vec![SPECIES_NAMES[s.dense_axis].to_string()];
            row.extend(cells(&s.point));
            row.extend([SPECIES_NAMES[species].to_string(), cell(s.action[k]), cell(sm[k])]);
            rows.push(row);
        }
    }
    out.write_csv("scatter.csv", &headers, rows)
}

fn write_summary(policy: &PolicySpec, s: &EvalSummary, out: &mut OutputDir) -> Result<()> {
    let headers = strs(&[
        "policy",
        "episodes",
        "mean_reward",
        "std_reward",
        "standard_error",
        "mean_length",
        "full_horizon_fraction",
    ]);
    let row = vec![
        policy.family().to_string(),
        s.episodes.len().to_string(),
        cell(s.mean_reward),
        cell(s.std_reward),
        cell(s.standard_error()),
        cell(s.mean_length),
        cell(s.full_horizon_fraction),
    ];
    out.write_csv("summary.csv", &headers, [row])
}

fn write_evaluation(cfg: &RunConfig, spec: &ModelSpec, policy: &PolicySpec, out: &mut OutputDir) -> Result<()> {
    let seed = StageSeeds::from_root(cfg.seed).eval;
    let (summary, trajs) = if cfg.eval.trajectories {
        let (s, t) = evaluate_with_trajectories(spec, policy, cfg.eval.n_episodes, seed)?;
        (s, Some(t))
    } else {
        (evaluate(spec, policy, cfg.eval.n_episodes, seed)?, None)
    };
    let rows = summary.episodes.iter().enumerate().map(|(i, e)| {
        vec![
            i.to_string(),
            cell(e.total_reward),
            cell(e.harvest),
            e.length.to_string(),
            e.cause.label(),
        ]
    });
    out.write_csv(
        "episodes.csv",
        &strs(&["episode", "total_reward", "harvest", "length", "cause"]),
        rows,
    )?;
    write_summary(policy, &summary, out)?;
    let h = emit_histogram_data(&summary, spec.horizon)?;
    let bins = |b: &[super::histogram::Bin]| -> Vec<Vec<String>> {
        b.iter().map(|b| vec![cell(b.lo), cell(b.hi), b.count.to_string()]).collect()
    };
    let bh = strs(&["lo", "hi", "count"]);
    out.write_csv("histogram_lengths.csv", &bh, bins(&h.length_bins))?;
    out.write_csv("histogram_rewards.csv", &bh, bins(&h.reward_bins))?;
    if let Some(t) = trajs {
        write_trajectories_gz(out, &t)?;
    }
    Ok(())
}

fn tradeoff(cfg: &RunConfig, spec: &ModelSpec, out: &mut OutputDir) -> Result<()> {
    let base = match cfg.policy.as_ref().map(|p| PolicySpec::load(p)).transpose()? {
        Some(PolicySpec::ConstantMortality { mortality }) => mortality,
        Some(other) => {
            return Err(Error::InvalidArgument(format!(
                "tradeoff needs a constant-mortality policy, got {}",
                other.family()
            )))
        }
        None => tune_cmort(spec, &cfg.tune, StageSeeds::from_root(cfg.seed).tune)?
            .best_point()
            .coords
            .clone(),
    };
    let rows = mortality_tradeoff(
        spec,
        &base,
        &cfg.tradeoff.fractions,
        cfg.eval.n_episodes,
        StageSeeds::from_root(cfg.seed).eval,
    )?;
    let mut headers = vec!["fraction".to_string()];
    headers.extend(harvest_header(spec, "mortality_"));
    headers.extend(strs(&["mean_reward", "std_reward", "mean_length", "full_horizon_fraction"]));
    let body = rows.iter().map(|r| {
        let mut row = vec![cell(r.fraction)];
        row.extend(cells(&r.mortality));
        row.extend([
            cell(r.summary.mean_reward),
            cell(r.summary.std_reward),
            cell(r.summary.mean_length),
            cell(r.summary.full_horizon_fraction),
        ]);
        row
    });
    out.write_csv("tradeoff.csv", &headers, body)
}

fn project(cfg: &RunConfig, spec: &ModelSpec, out: &mut OutputDir) -> Result<()> {
    let policy = resolve_policy(cfg, spec, false)?;
    let dense = species_axis(&cfg.projection.dense_axis, spec.dim())?;
    let color = cfg
        .projection
        .color_axis
        .as_deref()
        .map(|c| species_axis(c, spec.dim()))
        .transpose()?;
    let seeds = StageSeeds::from_root(cfg.seed);
    let (_, trajs) = evaluate_with_trajectories(spec, &policy, cfg.smooth.window_episodes, seeds.window)?;
    let windows = popular_window(&trajs, &spec.obs_bounds, cfg.smooth.quantiles)?;
    write_windows(&windows, out)?;
    let proj = policy_projection_with(
        &policy,
        spec,
        &windows,
        dense,
        color,
        cfg.projection.n_dense,
        cfg.projection.n_sparse,
    )?;
    let mut headers = species_header(spec, "");
    headers.extend(harvest_header(spec, "mortality_"));
    let rows = proj.rows.iter().map(|r| {
        let mut row = cells(&r.point);
        row.extend(cells(&r.action));
        row
    });
    out.write_csv("projection.csv", &headers, rows)
}

fn compare(cfg: &RunConfig, out: &mut OutputDir) -> Result<()> {
    let base = cfg.pipeline_options();
    let matrix = comparison_matrix(
        &cfg.compare.models,
        |spec| PipelineOptions {
            train: TrainConfig {
                iterations: cfg
                    .compare
                    .iterations
                    .unwrap_or_else(|| TrainConfig::for_model(spec.model_id).iterations),
                ..base.train.clone()
            },
            ..base.clone()
        },
        cfg.seed,
    )?;
    let headers = strs(&["strategy", "model", "mean_reward", "normalized_reward", "full_horizon_fraction"]);
    let mut rows = Vec::new();
    for (s, row) in matrix.strategies.iter().zip(&matrix.cells) {
        for (m, c) in matrix.models.iter().zip(row) {
            rows.push(vec![
                s.label().to_string(),
                m.number().to_string(),
                cell(c.mean_reward),
                cell(c.normalized),
                cell(c.full_horizon_fraction),
            ]);
        }
    }
    out.write_csv("comparison.csv", &headers, rows)
}

fn stability(cfg: &RunConfig, spec: &ModelSpec, out: &mut OutputDir) -> Result<()> {
    if spec.model_id == ModelId::One {
        return Err(Error::InvalidArgument("stability needs a three-species model".into()));
    }
    let report = stability_analysis(spec, &cfg.stability_options(), cfg.seed)?;
    let mut headers = strs(&["strength", "sample"]);
    headers.extend(ThreeSpeciesParams::DYNAMIC_NAMES.iter().map(|s| s.to_string()));
    headers.extend(strs(&["cesc_mean", "ppo_mean", "ppo_gp_mean", "ppo_diff", "ppo_gp_diff", "error"]));
    let opt = |v: Option<f64>| v.map(cell).unwrap_or_default();
    let rows = report.samples.iter().map(|s| {
        let mut row = vec![cell(s.strength), s.sample.to_string()];
        row.extend(cells(&s.params.dynamic()));
        row.extend([
            opt(s.cesc_mean),
            opt(s.ppo_mean),
            opt(s.ppo_gp_mean),
            opt(s.ppo_diff()),
            opt(s.ppo_gp_diff()),
            s.error.clone().unwrap_or_default(),
        ]);
        row
    });
    out.write_csv("stability_samples.csv", &headers, rows)?;
    let headers = strs(&[
        "strength",
        "completed",
        "train_iterations",
        "ppo_diff_mean",
        "ppo_diff_sd",
        "ppo_gp_diff_mean",
        "ppo_gp_diff_sd",
    ]);
    let rows = report.aggregates.iter().map(|a| {
        vec![
            cell(a.strength),
            a.completed.to_string(),
            report.train_iterations.to_string(),
            cell(a.ppo_diff_mean),
            cell(a.ppo_diff_sd),
            cell(a.ppo_gp_diff_mean),
            cell(a.ppo_gp_diff_sd),
        ]
    });
    out.write_csv("stability_summary.csv", &headers, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcommand_names_roundtrip() {
        for c in Subcommand::ALL {
            assert_eq!(c.name().parse::<Subcommand>().unwrap(), c);
        }
        assert!(matches!("plot".parse::<Subcommand>(), Err(Error::UnknownSubcommand(_))));
    }

    #[test]
    fn hash_ignores_output_location() {
        let mut a = RunConfig::for_model(ModelId::One, 3);
        let h = config_hash(&a).unwrap();
        a.out = Some(PathBuf::from("/tmp/x"));
        a.jobs = Some(4);
        assert_eq!(config_hash(&a).unwrap(), h);
        a.seed = 4;
        assert_ne!(config_hash(&a).unwrap(), h);
    }

    #[test]
    fn idle_policy_without_strategy() {
        let cfg = RunConfig::for_model(ModelId::Three, 1);
        let spec = cfg.model_spec().unwrap();
        let p = resolve_policy(&cfg, &spec, true).unwrap();
        assert_eq!(p, PolicySpec::ConstantMortality { mortality: vec![0.0, 0.0] });
        assert!(resolve_policy(&cfg, &spec, false).is_err());
    }
}
