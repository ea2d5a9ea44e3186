//! Preparing every management strategy for one problem.

use serde::{Deserialize, Serialize};

use super::eval::{evaluate, EvalSummary};
use super::tune::{tune_cesc, tune_cmort, TuneOptions, TuneReport};
use crate::dynamics::ModelSpec;
use crate::error::Result;
use crate::gp_smooth::{smooth_policy, SmoothOptions, Smoothed};
use crate::policy::{MlpParams, PolicySpec};
use crate::ppo::{train, TrainConfig, TrainCurve};
use crate::seed::derive_seed;

pub const DEFAULT_EVAL_EPISODES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "cesc")]
    ConstantEscapement,
    #[serde(rename = "cmort")]
    ConstantMortality,
    #[serde(rename = "ppo")]
    Ppo,
    #[serde(rename = "ppo_gp")]
    PpoGp,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::ConstantEscapement,
        Strategy::ConstantMortality,
        Strategy::Ppo,
        Strategy::PpoGp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::ConstantEscapement => "cesc",
            Strategy::ConstantMortality => "cmort",
            Strategy::Ppo => "ppo",
            Strategy::PpoGp => "ppo_gp",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Strategy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.label() == s)
            .ok_or_else(|| crate::Error::InvalidArgument(format!("unknown strategy '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineOptions {
    pub tune: TuneOptions,
    /// Training settings; `seed` is replaced by one derived from the
    /// pipeline seed.
    pub train: TrainConfig,
    pub smooth: SmoothOptions,
    pub eval_episodes: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            tune: TuneOptions::default(),
            train: TrainConfig::default(),
            smooth: SmoothOptions::default(),
            eval_episodes: DEFAULT_EVAL_EPISODES,
        }
    }
}

impl PipelineOptions {
    pub fn for_spec(spec: &ModelSpec) -> Self {
        Self {
            train: TrainConfig::for_model(spec.model_id),
            ..Self::default()
        }
    }
}

/// Seeds of the pipeline stages, all derived from one root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSeeds {
    pub tune: u64,
    pub train: u64,
    pub window: u64,
    pub eval: u64,
}

impl StageSeeds {
    pub fn from_root(root: u64) -> Self {
        Self {
            tune: derive_seed(root, "tune", 0),
            train: derive_seed(root, "train", 0),
            window: derive_seed(root, "window", 0),
            eval: derive_seed(root, "eval", 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedStrategies {
    pub cesc: TuneReport,
    pub cmort: TuneReport,
    pub mlp: MlpParams,
    pub curve: TrainCurve,
    pub smoothed: Smoothed,
    pub seeds: StageSeeds,
}

impl PreparedStrategies {
    pub fn policy(&self, spec: &ModelSpec, strategy: Strategy) -> PolicySpec {
        match strategy {
            Strategy::ConstantEscapement => self.cesc.best_policy(),
            Strategy::ConstantMortality => self.cmort.best_policy(),
            Strategy::Ppo => PolicySpec::Mlp {
                obs_bounds: spec.obs_bounds.clone(),
                params: self.mlp.clone(),
            },
            Strategy::PpoGp => self.smoothed.policy.clone(),
        }
    }
}

/// Tunes the classical policies and trains and smooths the neural one.
/// Tuning and training use independent seeds derived from `seed`; the
/// returned evaluation seed is distinct from the tuning seed so that the
/// tuned optimum is not scored on the episodes it was selected on.
pub fn prepare_strategies(
    spec: &ModelSpec,
    opts: &PipelineOptions,
    seed: u64,
) -> Result<PreparedStrategies> {
    prepare_with(spec, opts, seed, true)
}

/// As [`prepare_strategies`] but skipping the mortality tuning.
pub fn prepare_without_cmort(
    spec: &ModelSpec,
    opts: &PipelineOptions,
    seed: u64,
) -> Result<PreparedStrategies> {
    prepare_with(spec, opts, seed, false)
}

fn prepare_with(
    spec: &ModelSpec,
    opts: &PipelineOptions,
    seed: u64,
    with_cmort: bool,
) -> Result<PreparedStrategies> {
    let seeds = StageSeeds::from_root(seed);
    let cesc = tune_cesc(spec, &opts.tune, seeds.tune)?;
    log::info!("{}: tuned escapement {:?}", spec.model_id, cesc.best_point().coords);
    let cmort = if with_cmort {
        let r = tune_cmort(spec, &opts.tune, seeds.tune)?;
        log::info!("{}: tuned mortality {:?}", spec.model_id, r.best_point().coords);
        r
    } else {
        cesc.clone()
    };
    let cfg = TrainConfig {
        seed: seeds.train,
        ..opts.train.clone()
    };
    let (mlp, curve) = train(spec, &cfg, |_, _| Ok(()))?;
    log::info!("{}: trained for {} iterations", spec.model_id, cfg.iterations);
    let smoothed = smooth_policy(spec, &spec.obs_bounds, &mlp, &opts.smooth, seeds.window)?;
    Ok(PreparedStrategies {
        cesc,
        cmort,
        mlp,
        curve,
        smoothed,
        seeds,
    })
}

/// Evaluates the requested strategies on the evaluation seed.
pub fn evaluate_strategies(
    spec: &ModelSpec,
    prepared: &PreparedStrategies,
    strategies: &[Strategy],
    n_episodes: usize,
) -> Result<Vec<(Strategy, EvalSummary)>> {
    strategies
        .iter()
        .map(|&s| {
            let summary = evaluate(spec, &prepared.policy(spec, s), n_episodes, prepared.seeds.eval)?;
            Ok((s, summary))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_labels_roundtrip() {
        for s in Strategy::ALL {
            assert_eq!(s.label().parse::<Strategy>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.label()));
        }
        assert!("greedy".parse::<Strategy>().is_err());
    }

    #[test]
    fn stage_seeds_are_distinct() {
        let s = StageSeeds::from_root(5);
        let all = [s.tune, s.train, s.window, s.eval];
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(all[i], all[j]);
            }
        }
        assert_eq!(s, StageSeeds::from_root(5));
    }
}
