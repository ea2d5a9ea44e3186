use crate::error::{Error, Result};

/// Generalized advantage estimation.
///
/// `values` holds `V(s_0) .. V(s_T)`: one entry per step plus the bootstrap
/// value of the state following the last step. `dones[t]` marks that the
/// episode ended at step `t`, which cuts both the bootstrap and the
/// recursion. Returns `(advantages, return_targets)`.
pub fn gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = rewards.len();
    if values.len() != n + 1 {
        return Err(Error::Dimension {
            what: "gae values (steps + 1 bootstrap)",
            expected: n + 1,
            actual: values.len(),
        });
    }
    if dones.len() != n {
        return Err(Error::Dimension {
            what: "gae episode boundaries",
            expected: n,
            actual: dones.len(),
        });
    }
    let mut adv = vec![0.0; n];
    let mut next = 0.0;
    for t in (0..n).rev() {
        let live = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * values[t + 1] * live - values[t];
        next = delta + gamma * lambda * live * next;
        adv[t] = next;
    }
    let targets = adv.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((adv, targets))
}

/// Shifts and scales `xs` in place to zero mean and unit (population)
/// variance. Leaves constant inputs centred but unscaled.
pub fn normalize_advantages(xs: &mut [f64]) {
    if xs.is_empty() {
        return;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    for x in xs.iter_mut() {
        *x -= mean;
        if sd > 1e-12 {
            *x /= sd;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    /// O(T^2) forward sum: A_t = sum_k (gamma lambda)^k delta_{t+k}, stopping
    /// after the first episode boundary.
    pub(crate) fn brute_force(
        rewards: &[f64],
        values: &[f64],
        dones: &[bool],
        gamma: f64,
        lambda: f64,
    ) -> Vec<f64> {
        let n = rewards.len();
        let delta: Vec<f64> = (0..n)
            .map(|t| {
                let live = if dones[t] { 0.0 } else { 1.0 };
                rewards[t] + gamma * values[t + 1] * live - values[t]
            })
            .collect();
        (0..n)
            .map(|t| {
                let mut acc = 0.0;
                let mut w = 1.0;
                for k in t..n {
                    acc += w * delta[k];
                    if dones[k] {
                        break;
                    }
                    w *= gamma * lambda;
                }
                acc
            })
            .collect()
    }

    #[test]
    fn gamma_zero_is_one_step_residual() {
        let r = [1.0, 2.0, -3.0];
        let v = [0.5, 0.1, 0.2, 9.0];
        let (a, _) = gae(&r, &v, &[false, false, false], 0.0, 0.95).unwrap();
        assert_eq!(a, vec![0.5, 1.9, -3.2]);
    }

    #[test]
    fn lambda_zero_is_td_residual() {
        let r = [1.0, 2.0, -3.0];
        let v = [0.5, 0.1, 0.2, 9.0];
        let (a, targets) = gae(&r, &v, &[false, true, false], 0.9, 0.0).unwrap();
        let expected = [1.0 + 0.9 * 0.1 - 0.5, 2.0 - 0.1, -3.0 + 0.9 * 9.0 - 0.2];
        for (x, y) in a.iter().zip(expected) {
            assert!((x - y).abs() < 1e-15);
        }
        for t in 0..3 {
            assert!((targets[t] - (a[t] + v[t])).abs() < 1e-15);
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(gae(&[1.0], &[0.0], &[false], 0.9, 0.9).is_err());
        assert!(gae(&[1.0], &[0.0, 0.0], &[], 0.9, 0.9).is_err());
    }

    #[test]
    fn matches_brute_force_on_random_trajectories() {
        let mut rng = rng_from_seed(21);
        for _ in 0..100 {
            let n = rng.random_range(1..=50);
            let r: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let v: Vec<f64> = (0..=n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let d: Vec<bool> = (0..n).map(|_| rng.random_bool(0.1)).collect();
            let (g, l) = (rng.random(), rng.random());
            let (a, _) = gae(&r, &v, &d, g, l).unwrap();
            let b = brute_force(&r, &v, &d, g, l);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn normalization_gives_zero_mean_unit_variance(
            xs in proptest::collection::vec(-100.0f64..100.0, 2..200)
        ) {
            let mut ys = xs.clone();
            normalize_advantages(&mut ys);
            let n = ys.len() as f64;
            let mean = ys.iter().sum::<f64>() / n;
            let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n;
            prop_assert!(mean.abs() < 1e-10);
            let spread = xs.iter().cloned().fold(f64::MIN, f64::max)
                - xs.iter().cloned().fold(f64::MAX, f64::min);
            if spread > 1e-6 {
                prop_assert!((var - 1.0).abs() < 1e-10);
            }
        }
    }
}
