//! Proximal policy optimization with a clipped surrogate objective,
//! generalized advantage estimation and Adam, written against the
//! hand-differentiated network in [`crate::policy::MlpParams`].

mod adam;
mod gae;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use adam::Adam;
pub use gae::{gae, normalize_advantages};

use crate::dynamics::{ModelId, ModelSpec};
use crate::error::{Error, Result};
use crate::policy::{gaussian_log_prob, normalize_state, sample_action, MlpParams, DEFAULT_HIDDEN};
use crate::seed::{child_rng, SimRng};

const HALF_LN_2PI_E: f64 = 1.418_938_533_204_672_7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub iterations: usize,
    pub steps_per_iteration: usize,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_epsilon: f64,
    pub learning_rate: f64,
    pub minibatch_size: usize,
    pub epochs_per_iteration: usize,
    pub entropy_coefficient: f64,
    pub value_coefficient: f64,
    /// Global gradient-norm clip; `None` disables clipping.
    pub max_grad_norm: Option<f64>,
    pub hidden: usize,
    pub init_log_std: f64,
    /// Write a checkpoint every this many iterations (0 disables).
    pub checkpoint_every: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            iterations: 300,
            steps_per_iteration: 4000,
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_epsilon: 0.2,
            learning_rate: 3e-4,
            minibatch_size: 128,
            epochs_per_iteration: 10,
            entropy_coefficient: 0.0,
            value_coefficient: 0.5,
            max_grad_norm: None,
            hidden: DEFAULT_HIDDEN,
            init_log_std: -0.5,
            checkpoint_every: 10,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Default budget: 100 iterations for the single-species model, 300
    /// otherwise.
    pub fn for_model(model: ModelId) -> Self {
        Self {
            iterations: if model == ModelId::One { 100 } else { 300 },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("train config: {m}")));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.gae_lambda) {
            return bad("gae_lambda must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&self.clip_epsilon) {
            return bad("clip_epsilon must lie in [0, 1)");
        }
        if !(self.learning_rate > 0.0) {
            return bad("learning_rate must be > 0");
        }
        if self.steps_per_iteration == 0 || self.minibatch_size == 0 {
            return bad("steps_per_iteration and minibatch_size must be >= 1");
        }
        if self.epochs_per_iteration == 0 || self.hidden == 0 {
            return bad("epochs_per_iteration and hidden must be >= 1");
        }
        if self.entropy_coefficient < 0.0 || self.value_coefficient < 0.0 {
            return bad("loss coefficients must be >= 0");
        }
        if let Some(g) = self.max_grad_norm {
            if !(g > 0.0) {
                return bad("max_grad_norm must be > 0");
            }
        }
        if !self.init_log_std.is_finite() {
            return bad("init_log_std must be finite");
        }
        Ok(())
    }
}

/// Step-aligned experience from one or more episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutBatch {
    pub observations: Vec<Vec<f64>>,
    /// Unclamped action draws.
    pub actions: Vec<Vec<f64>>,
    pub log_probs: Vec<f64>,
    pub rewards: Vec<f64>,
    /// `V(s_t)` for each step plus the bootstrap value after the last step.
    pub values: Vec<f64>,
    /// True where the episode ended at this step.
    pub dones: Vec<bool>,
    /// Undiscounted returns of episodes completed inside the batch.
    pub episode_returns: Vec<f64>,
    pub episode_lengths: Vec<usize>,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// Runs the stochastic policy for exactly `n_steps` transitions, resetting to
/// the fixed initial state at every termination.
pub fn collect_rollouts(
    spec: &ModelSpec,
    params: &MlpParams,
    n_steps: usize,
    rng: &mut SimRng,
) -> Result<RolloutBatch> {
    if n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be >= 1".into()));
    }
    let mut batch = RolloutBatch {
        observations: Vec::with_capacity(n_steps),
        actions: Vec::with_capacity(n_steps),
        log_probs: Vec::with_capacity(n_steps),
        rewards: Vec::with_capacity(n_steps),
        values: Vec::with_capacity(n_steps + 1),
        dones: Vec::with_capacity(n_steps),
        episode_returns: Vec::new(),
        episode_lengths: Vec::new(),
    };
    let mut pops = spec.initial_state.clone();
    let mut t = 0usize;
    let mut ep_return = 0.0;
    for _ in 0..n_steps {
        let obs = normalize_state(&pops, &spec.obs_bounds);
        let out = params.forward(&obs)?;
        let sampled = sample_action(&out.mean, &out.log_std, rng);
        let tr = spec.advance(&mut pops, t, &sampled.action, rng)?;
        t += 1;
        let reward = tr.reward();
        ep_return += reward;
        let done = tr.cause.is_terminal();

        batch.observations.push(obs);
        batch.actions.push(sampled.raw);
        batch.log_probs.push(sampled.log_prob);
        batch.rewards.push(reward);
        batch.values.push(out.value);
        batch.dones.push(done);

        if done {
            batch.episode_returns.push(ep_return);
            batch.episode_lengths.push(t);
            pops.clone_from(&spec.initial_state);
            t = 0;
            ep_return = 0.0;
        }
    }
    let obs = normalize_state(&pops, &spec.obs_bounds);
    batch.values.push(params.forward(&obs)?.value);
    Ok(batch)
}

/// Training samples for one update: the batch plus its advantages and
/// return targets.
#[derive(Debug, Clone)]
pub struct PreparedBatch {
    pub observations: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub log_probs: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl PreparedBatch {
    /// Runs GAE on `batch` and normalizes the advantages.
    pub fn from_rollouts(batch: &RolloutBatch, gamma: f64, lambda: f64) -> Result<Self> {
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty rollout batch".into()));
        }
        let (mut advantages, returns) = gae(&batch.rewards, &batch.values, &batch.dones, gamma, lambda)?;
        normalize_advantages(&mut advantages);
        Ok(Self {
            observations: batch.observations.clone(),
            actions: batch.actions.clone(),
            log_probs: batch.log_probs.clone(),
            advantages,
            returns,
        })
    }

    pub fn len(&self) -> usize {
        self.advantages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.advantages.is_empty()
    }
}

/// Loss components, averaged over the samples they were computed on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    /// Clipped surrogate objective (to be maximized).
    pub surrogate: f64,
    pub value_loss: f64,
    pub entropy: f64,
    /// `-surrogate + c_v value_loss - c_e entropy`.
    pub total: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
}

/// Total PPO loss over `indices` of `batch` and its gradient with respect to
/// every network parameter.
pub fn loss_and_grad(
    params: &MlpParams,
    batch: &PreparedBatch,
    indices: &[usize],
    cfg: &TrainConfig,
) -> Result<(LossReport, Vec<f64>)> {
    let mut grads = vec![0.0; params.data.len()];
    let mut rep = LossReport::default();
    let scale = 1.0 / indices.len() as f64;
    let eps = cfg.clip_epsilon;
    let a = params.n_actions;
    let mut d_mean = vec![0.0; a];
    let mut d_log_std = vec![0.0; a];

    for &i in indices {
        let (out, cache) = params.forward_cached(&batch.observations[i])?;
        let act = &batch.actions[i];
        let adv = batch.advantages[i];
        let logp = gaussian_log_prob(act, &out.mean, &out.log_std);
        let log_ratio = logp - batch.log_probs[i];
        let ratio = log_ratio.exp();
        let unclipped = ratio * adv;
        let clipped = ratio.clamp(1.0 - eps, 1.0 + eps) * adv;
        let surrogate = unclipped.min(clipped);
        // d(-surrogate)/d(logp): live only when the unclipped branch is the min
        let d_logp = if unclipped <= clipped { -adv * ratio * scale } else { 0.0 };
        if (ratio - 1.0).abs() > eps {
            rep.clip_fraction += scale;
        }
        rep.approx_kl += ((ratio - 1.0) - log_ratio) * scale;

        let v_err = out.value - batch.returns[i];
        let entropy: f64 = out.log_std.iter().map(|s| s + HALF_LN_2PI_E).sum();
        rep.surrogate += surrogate * scale;
        rep.value_loss += v_err * v_err * scale;
        rep.entropy += entropy * scale;

        for j in 0..a {
            let var = (2.0 * out.log_std[j]).exp();
            let diff = act[j] - out.mean[j];
            d_mean[j] = d_logp * diff / var;
            d_log_std[j] = d_logp * (diff * diff / var - 1.0) - cfg.entropy_coefficient * scale;
        }
        let d_value = 2.0 * cfg.value_coefficient * v_err * scale;
        params.backward(&cache, &d_mean, &d_log_std, d_value, &mut grads);
    }
    rep.total = -rep.surrogate + cfg.value_coefficient * rep.value_loss
        - cfg.entropy_coefficient * rep.entropy;
    Ok((rep, grads))
}

/// Epochs of shuffled-minibatch Adam steps on the clipped objective.
/// Returns the loss report averaged over all minibatches.
pub fn ppo_update<R: Rng + ?Sized>(
    params: &mut MlpParams,
    optimizer: &mut Adam,
    batch: &PreparedBatch,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<LossReport> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("empty training batch".into()));
    }
    let mut order: Vec<usize> = (0..batch.len()).collect();
    let mut acc = LossReport::default();
    let mut count = 0usize;
    for epoch in 0..cfg.epochs_per_iteration {
        order.shuffle(rng);
        for (mb, chunk) in order.chunks(cfg.minibatch_size).enumerate() {
            let (rep, mut grads) = loss_and_grad(params, batch, chunk, cfg)?;
            if !rep.total.is_finite() {
                return Err(Error::NonFinite {
                    quantity: "loss",
                    epoch,
                    minibatch: mb,
                });
            }
            if let Some(max_norm) = cfg.max_grad_norm {
                let norm = grads.iter().map(|g| g * g).sum::<f64>().sqrt();
                if norm > max_norm {
                    let s = max_norm / norm;
                    grads.iter_mut().for_each(|g| *g *= s);
                }
            }
            if grads.iter().any(|g| !g.is_finite()) {
                return Err(Error::NonFinite {
                    quantity: "gradient",
                    epoch,
                    minibatch: mb,
                });
            }
            optimizer.step(&mut params.data, &grads);
            acc.surrogate += rep.surrogate;
            acc.value_loss += rep.value_loss;
            acc.entropy += rep.entropy;
            acc.total += rep.total;
            acc.approx_kl += rep.approx_kl;
            acc.clip_fraction += rep.clip_fraction;
            count += 1;
        }
    }
    let n = count as f64;
    Ok(LossReport {
        surrogate: acc.surrogate / n,
        value_loss: acc.value_loss / n,
        entropy: acc.entropy / n,
        total: acc.total / n,
        approx_kl: acc.approx_kl / n,
        clip_fraction: acc.clip_fraction / n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub iteration: usize,
    /// Mean undiscounted return of episodes completed during the iteration's
    /// rollouts (NaN if none completed).
    pub mean_return: f64,
    pub mean_length: f64,
    pub episodes: usize,
    pub surrogate: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainCurve {
    pub rows: Vec<CurveRow>,
}

/// Full training loop: collect, estimate advantages, update; repeated for
/// `cfg.iterations`. `on_checkpoint(iteration, params)` is invoked every
/// `cfg.checkpoint_every` iterations.
///
/// The result is a pure function of `(spec, cfg)`; all randomness derives
/// from `cfg.seed`.
pub fn train<F>(spec: &ModelSpec, cfg: &TrainConfig, mut on_checkpoint: F) -> Result<(MlpParams, TrainCurve)>
where
    F: FnMut(usize, &MlpParams) -> Result<()>,
{
    cfg.validate()?;
    spec.validate()?;
    let mut init_rng = child_rng(cfg.seed, "ppo-init", 0);
    let mut params = MlpParams::init(
        spec.dim(),
        cfg.hidden,
        spec.n_actions(),
        cfg.init_log_std,
        &mut init_rng,
    );
    let mut optimizer = Adam::new(params.data.len(), cfg.learning_rate);
    let mut curve = TrainCurve::default();

    for it in 0..cfg.iterations {
        let mut rollout_rng = child_rng(cfg.seed, "ppo-rollout", it as u64);
        let batch = collect_rollouts(spec, &params, cfg.steps_per_iteration, &mut rollout_rng)?;
        let prepared = PreparedBatch::from_rollouts(&batch, cfg.gamma, cfg.gae_lambda)?;
        let mut shuffle_rng = child_rng(cfg.seed, "ppo-shuffle", it as u64);
        let rep = ppo_update(&mut params, &mut optimizer, &prepared, cfg, &mut shuffle_rng)?;

        let episodes = batch.episode_returns.len();
        let (mean_return, mean_length) = if episodes == 0 {
            (f64::NAN, f64::NAN)
        } else {
            (
                batch.episode_returns.iter().sum::<f64>() / episodes as f64,
                batch.episode_lengths.iter().sum::<usize>() as f64 / episodes as f64,
            )
        };
        log::debug!(
            "iter {it}: return {mean_return:.4} length {mean_length:.1} kl {:.5} std {:?}",
            rep.approx_kl,
            params.log_std()
        );
        curve.rows.push(CurveRow {
            iteration: it + 1,
            mean_return,
            mean_length,
            episodes,
            surrogate: rep.surrogate,
            value_loss: rep.value_loss,
            entropy: rep.entropy,
            approx_kl: rep.approx_kl,
            clip_fraction: rep.clip_fraction,
        });
        if cfg.checkpoint_every > 0 && (it + 1) % cfg.checkpoint_every == 0 {
            on_checkpoint(it + 1, &params)?;
        }
    }
    Ok((params, curve))
}
