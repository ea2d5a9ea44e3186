//! Robustness of the learned advantage to perturbed model parameters.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::eval::mean_sd;
use super::pipeline::{evaluate_strategies, prepare_without_cmort, PipelineOptions, Strategy};
use crate::dynamics::{ModelId, ModelParams, ModelSpec, ThreeSpeciesParams, BOUND_EPISODES, BOUND_SEED};
use crate::error::{Error, Result};
use crate::ppo::TrainConfig;
use crate::seed::{child_rng, derive_seed};

pub const DEFAULT_STRENGTHS: [f64; 5] = [0.04, 0.08, 0.12, 0.16, 0.20];
/// Training budget per perturbed sample.
pub const DEFAULT_STABILITY_ITERATIONS: usize = 100;

/// Scales one value by `1 + g`, `g ~ N(0, sigma^2)`, redrawing `g` until the
/// result is positive. Zero and negative inputs are returned unchanged.
fn perturb_value<R: Rng + ?Sized>(v: f64, normal: &Normal<f64>, rng: &mut R) -> f64 {
    if v <= 0.0 {
        return v;
    }
    loop {
        let p = (1.0 + normal.sample(rng)) * v;
        if p > 0.0 {
            return p;
        }
    }
}

/// Multiplies each dynamic parameter by an independent `1 + g`. Noise
/// variances are left alone unless `include_variances` is set.
pub fn perturb_params<R: Rng + ?Sized>(
    params: &ThreeSpeciesParams,
    sigma: f64,
    include_variances: bool,
    rng: &mut R,
) -> Result<ThreeSpeciesParams> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("perturbation strength {sigma} must be >= 0")));
    }
    if sigma == 0.0 {
        return Ok(*params);
    }
    let normal = Normal::new(0.0, sigma).expect("finite positive sd");
    let dynamic = params.dynamic().map(|v| perturb_value(v, &normal, rng));
    let mut out = params.with_dynamic(dynamic);
    if include_variances {
        out = out.with_variances(params.variances().map(|v| perturb_value(v, &normal, rng)));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityOptions {
    pub strengths: Vec<f64>,
    pub n_samples: usize,
    pub include_variances: bool,
    pub pipeline: PipelineOptions,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            strengths: DEFAULT_STRENGTHS.to_vec(),
            n_samples: 5,
            include_variances: false,
            pipeline: PipelineOptions {
                train: TrainConfig {
                    iterations: DEFAULT_STABILITY_ITERATIONS,
                    ..TrainConfig::default()
                },
                ..PipelineOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySample {
    pub strength: f64,
    pub sample: usize,
    pub params: ThreeSpeciesParams,
    pub cesc_mean: Option<f64>,
    pub ppo_mean: Option<f64>,
    pub ppo_gp_mean: Option<f64>,
    /// Why the sample was skipped, if it was.
    pub error: Option<String>,
}

impl StabilitySample {
    pub fn ppo_diff(&self) -> Option<f64> {
        Some(self.ppo_mean? - self.cesc_mean?)
    }

    pub fn ppo_gp_diff(&self) -> Option<f64> {
        Some(self.ppo_gp_mean? - self.cesc_mean?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityAggregate {
    pub strength: f64,
    pub completed: usize,
    pub ppo_diff_mean: f64,
    pub ppo_diff_sd: f64,
    pub ppo_gp_diff_mean: f64,
    pub ppo_gp_diff_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub samples: Vec<StabilitySample>,
    pub aggregates: Vec<StabilityAggregate>,
    pub train_iterations: usize,
}

impl StabilityReport {
    pub fn aggregate(strengths: &[f64], samples: &[StabilitySample]) -> Vec<StabilityAggregate> {
        strengths
            .iter()
            .map(|&strength| {
                let of = |f: fn(&StabilitySample) -> Option<f64>| -> Vec<f64> {
                    samples
                        .iter()
                        .filter(|s| s.strength == strength)
                        .filter_map(f)
                        .collect()
                };
                let ppo = of(StabilitySample::ppo_diff);
                let gp = of(StabilitySample::ppo_gp_diff);
                let (pm, ps) = if ppo.is_empty() { (f64::NAN, f64::NAN) } else { mean_sd(&ppo) };
                let (gm, gs) = if gp.is_empty() { (f64::NAN, f64::NAN) } else { mean_sd(&gp) };
                StabilityAggregate {
                    strength,
                    completed: gp.len(),
                    ppo_diff_mean: pm,
                    ppo_diff_sd: ps,
                    ppo_gp_diff_mean: gm,
                    ppo_gp_diff_sd: gs,
                }
            })
            .collect()
    }
}

/// Builds the perturbed problem for one `(strength, sample)` pair. The
/// perturbation stream depends only on the strength and sample index, so
/// the order in which samples are run does not matter.
pub fn perturbed_spec(
    base: &ModelSpec,
    strength: f64,
    sample: usize,
    include_variances: bool,
    seed: u64,
) -> Result<ModelSpec> {
    let ModelParams::ThreeSpecies(p) = &base.params else {
        return Err(Error::InvalidSpec("stability analysis needs a three-species model".into()));
    };
    let mut rng = child_rng(seed, &format!("perturb-{strength}"), sample as u64);
    let perturbed = perturb_params(p, strength, include_variances, &mut rng)?;
    let mut spec = base.clone();
    spec.params = ModelParams::ThreeSpecies(perturbed);
    spec.validate()?;
    spec.derive_obs_bounds(BOUND_EPISODES, BOUND_SEED)?;
    Ok(spec)
}

fn run_sample(spec: &ModelSpec, opts: &PipelineOptions, sample_seed: u64) -> Result<(f64, f64, f64)> {
    let prepared = prepare_without_cmort(spec, opts, sample_seed)?;
    let evals = evaluate_strategies(
        spec,
        &prepared,
        &[Strategy::ConstantEscapement, Strategy::Ppo, Strategy::PpoGp],
        opts.eval_episodes,
    )?;
    Ok((evals[0].1.mean_reward, evals[1].1.mean_reward, evals[2].1.mean_reward))
}

/// For every strength and sample: perturb, re-derive normalization, tune
/// escapement, train and smooth, then record each method's mean reward.
/// Samples whose pipeline fails are kept with the error and excluded from
/// the aggregates.
pub fn stability_analysis(base: &ModelSpec, opts: &StabilityOptions, seed: u64) -> Result<StabilityReport> {
    if opts.n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be >= 1".into()));
    }
    if base.model_id == ModelId::One {
        return Err(Error::InvalidSpec("stability analysis needs a three-species model".into()));
    }
    let mut samples = Vec::new();
    for &strength in &opts.strengths {
        for sample in 0..opts.n_samples {
            let spec = perturbed_spec(base, strength, sample, opts.include_variances, seed);
            let params = match &spec {
                Ok(s) => match s.params {
                    ModelParams::ThreeSpecies(p) => p,
                    ModelParams::SingleSpecies(_) => unreachable!("checked above"),
                },
                Err(_) => ThreeSpeciesParams::default(),
            };
            let sample_seed = derive_seed(seed, "stability-sample", sample as u64);
            let result = spec.and_then(|s| run_sample(&s, &opts.pipeline, sample_seed));
            let row = match result {
                Ok((c, p, g)) => {
                    log::info!("strength {strength} sample {sample}: ppo {:.3} ppo+gp {:.3} vs cesc {c:.3}", p - c, g - c);
                    StabilitySample {
                        strength,
                        sample,
                        params,
                        cesc_mean: Some(c),
                        ppo_mean: Some(p),
                        ppo_gp_mean: Some(g),
                        error: None,
                    }
                }
                Err(e) => {
                    log::warn!("strength {strength} sample {sample} skipped: {e}");
                    StabilitySample {
                        strength,
                        sample,
                        params,
                        cesc_mean: None,
                        ppo_mean: None,
                        ppo_gp_mean: None,
                        error: Some(e.to_string()),
                    }
                }
            };
            samples.push(row);
        }
    }
    let aggregates = StabilityReport::aggregate(&opts.strengths, &samples);
    Ok(StabilityReport {
        samples,
        aggregates,
        train_iterations: opts.pipeline.train.iterations,
    })
}
