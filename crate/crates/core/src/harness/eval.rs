use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelSpec, SimState, StepRecord, Termination};
use crate::error::{Error, Result};
use crate::policy::PolicySpec;
use crate::seed::child_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    /// Undiscounted sum of harvests plus any near-extinction penalty.
    pub total_reward: f64,
    pub harvest: f64,
    pub length: usize,
    pub cause: Termination,
}

impl EpisodeOutcome {
    pub fn full_horizon(&self) -> bool {
        self.cause == Termination::Horizon
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub episodes: Vec<EpisodeOutcome>,
    pub mean_reward: f64,
    /// Sample standard deviation of episode rewards (0 for one episode).
    pub std_reward: f64,
    pub mean_length: f64,
    pub full_horizon_fraction: f64,
}

impl EvalSummary {
    pub fn from_episodes(episodes: Vec<EpisodeOutcome>) -> Self {
        let n = episodes.len() as f64;
        let rewards: Vec<f64> = episodes.iter().map(|e| e.total_reward).collect();
        let (mean_reward, std_reward) = mean_sd(&rewards);
        Self {
            mean_length: episodes.iter().map(|e| e.length as f64).sum::<f64>() / n,
            full_horizon_fraction: episodes.iter().filter(|e| e.full_horizon()).count() as f64 / n,
            mean_reward,
            std_reward,
            episodes,
        }
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.total_reward).collect()
    }

    pub fn standard_error(&self) -> f64 {
        self.std_reward / (self.episodes.len() as f64).sqrt()
    }
}

/// Mean and sample standard deviation.
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, sd)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<StepRecord>,
    pub total_reward: f64,
}

/// Runs one episode from the fixed initial state with the deterministic
/// policy. The episode's random stream is `child_rng(seed, "episode", index)`,
/// so episode `i` sees the same noise path under every policy.
fn run_episode(
    spec: &ModelSpec,
    policy: &PolicySpec,
    seed: u64,
    index: u64,
    record: bool,
) -> Result<(EpisodeOutcome, Option<Trajectory>)> {
    let mut rng = child_rng(seed, "episode", index);
    let mut pops = spec.initial_state.clone();
    let mut t = 0;
    let mut total = 0.0;
    let mut harvest = 0.0;
    let mut steps = Vec::new();
    loop {
        let action = policy.act(spec, &pops)?;
        let before = record.then(|| SimState {
            pops: pops.clone(),
            t,
        });
        let tr = spec.advance(&mut pops, t, &action, &mut rng)?;
        t += 1;
        total += tr.reward();
        harvest += tr.harvest;
        if let Some(state_before) = before {
            steps.push(StepRecord {
                state_before,
                action,
                harvest_reward: tr.harvest,
                penalty: tr.penalty,
                state_after: SimState {
                    pops: pops.clone(),
                    t,
                },
                terminated: tr.cause.is_terminal(),
                cause: tr.cause,
            });
        }
        if tr.cause.is_terminal() {
            let outcome = EpisodeOutcome {
                total_reward: total,
                harvest,
                length: t,
                cause: tr.cause,
            };
            let traj = record.then_some(Trajectory {
                steps,
                total_reward: total,
            });
            return Ok((outcome, traj));
        }
    }
}

fn check(spec: &ModelSpec, policy: &PolicySpec, n_episodes: usize) -> Result<()> {
    if n_episodes == 0 {
        return Err(Error::InvalidArgument("n_episodes must be >= 1".into()));
    }
    spec.validate()?;
    policy.check_compatible(spec)
}

/// Monte Carlo evaluation of a policy in deterministic mode.
pub fn evaluate(
    spec: &ModelSpec,
    policy: &PolicySpec,
    n_episodes: usize,
    seed: u64,
) -> Result<EvalSummary> {
    check(spec, policy, n_episodes)?;
    let episodes = (0..n_episodes as u64)
        .into_par_iter()
        .map(|i| run_episode(spec, policy, seed, i, false).map(|(o, _)| o))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalSummary::from_episodes(episodes))
}

/// As [`evaluate`], also returning every step of every episode.
pub fn evaluate_with_trajectories(
    spec: &ModelSpec,
    policy: &PolicySpec,
    n_episodes: usize,
    seed: u64,
) -> Result<(EvalSummary, Vec<Trajectory>)> {
    check(spec, policy, n_episodes)?;
    let results = (0..n_episodes as u64)
        .into_par_iter()
        .map(|i| run_episode(spec, policy, seed, i, true))
        .collect::<Result<Vec<_>>>()?;
    let (episodes, trajs): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok((
        EvalSummary::from_episodes(episodes),
        trajs.into_iter().map(|t| t.expect("recorded")).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ModelId;

    #[test]
    fn no_harvest_no_noise_is_safe_and_zero() {
        let spec = ModelSpec::new(ModelId::Three).noise_free();
        let policy = PolicySpec::ConstantMortality {
            mortality: vec![0.0, 0.0],
        };
        let s = evaluate(&spec, &policy, 10, 1).unwrap();
        assert_eq!(s.full_horizon_fraction, 1.0);
        assert_eq!(s.mean_reward, 0.0);
        assert!(s.episodes.iter().all(|e| e.length == 200));
    }

    #[test]
    fn full_mortality_ends_after_one_step() {
        let spec = ModelSpec::new(ModelId::One).noise_free();
        let policy = PolicySpec::ConstantMortality {
            mortality: vec![1.0],
        };
        let s = evaluate(&spec, &policy, 20, 3).unwrap();
        for e in &s.episodes {
            assert_eq!(e.length, 1);
            assert!((e.total_reward - (0.7 - 100.0)).abs() < 1e-12);
        }
        assert_eq!(s.full_horizon_fraction, 0.0);
    }

    #[test]
    fn same_seed_same_summary() {
        let spec = ModelSpec::new(ModelId::Four);
        let policy = PolicySpec::ConstantEscapement {
            escapement: vec![0.4, 0.4],
        };
        let a = evaluate(&spec, &policy, 30, 5).unwrap();
        let b = evaluate(&spec, &policy, 30, 5).unwrap();
        assert_eq!(a, b);
        let c = evaluate(&spec, &policy, 30, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn summary_is_internally_consistent() {
        let spec = ModelSpec::new(ModelId::One);
        let policy = PolicySpec::ConstantMortality {
            mortality: vec![0.05],
        };
        let s = evaluate(&spec, &policy, 50, 9).unwrap();
        let (m, sd) = mean_sd(&s.rewards());
        assert_eq!(m, s.mean_reward);
        assert_eq!(sd, s.std_reward);
        assert!(s.episodes.iter().all(|e| e.length <= spec.horizon));
        assert!((0.0..=1.0).contains(&s.full_horizon_fraction));
    }

    #[test]
    fn trajectories_agree_with_summary() {
        let spec = ModelSpec::new(ModelId::Three);
        let policy = PolicySpec::ConstantEscapement {
            escapement: vec![0.3, 0.3],
        };
        let (s, trajs) = evaluate_with_trajectories(&spec, &policy, 5, 2).unwrap();
        assert_eq!(s, evaluate(&spec, &policy, 5, 2).unwrap());
        for (e, tr) in s.episodes.iter().zip(&trajs) {
            assert_eq!(tr.steps.len(), e.length);
            let sum: f64 = tr.steps.iter().map(|r| r.reward()).sum();
            assert!((sum - e.total_reward).abs() < 1e-12);
            assert!(tr.steps.last().unwrap().terminated);
        }
    }

    #[test]
    fn rejects_zero_episodes_and_shape_mismatch() {
        let spec = ModelSpec::new(ModelId::One);
        let policy = PolicySpec::ConstantMortality {
            mortality: vec![0.1],
        };
        assert!(evaluate(&spec, &policy, 0, 1).is_err());
        let wrong = PolicySpec::ConstantMortality {
            mortality: vec![0.1, 0.1],
        };
        assert!(evaluate(&spec, &wrong, 3, 1).is_err());
    }
}
