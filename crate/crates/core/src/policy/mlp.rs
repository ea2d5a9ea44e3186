//! Shared-trunk actor-critic network: `d -> 64 -> 64` with tanh activations,
//! a policy head producing per-species action means squashed onto `[0,1]`, a
//! state-independent log standard deviation, and a scalar value head.
//!
//! Parameters live in a single flat vector so the optimizer can treat them
//! uniformly; [`Layout`] maps named blocks to offsets.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_HIDDEN: usize = 64;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layout {
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    w_pi: usize,
    b_pi: usize,
    log_std: usize,
    w_v: usize,
    b_v: usize,
    len: usize,
}

impl Layout {
    fn new(d: usize, h: usize, a: usize) -> Self {
        let w1 = 0;
        let b1 = w1 + h * d;
        let w2 = b1 + h;
        let b2 = w2 + h * h;
        let w_pi = b2 + h;
        let b_pi = w_pi + a * h;
        let log_std = b_pi + a;
        let w_v = log_std + a;
        let b_v = w_v + h;
        Self {
            w1,
            b1,
            w2,
            b2,
            w_pi,
            b_pi,
            log_std,
            w_v,
            b_v,
            len: b_v + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub input_dim: usize,
    pub hidden: usize,
    pub n_actions: usize,
    /// Row-major blocks in order: w1 (hidden x input), b1, w2 (hidden x
    /// hidden), b2, w_pi (actions x hidden), b_pi, log_std, w_v (hidden), b_v.
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpOutput {
    /// Action mean in `[0,1]` per harvested species.
    pub mean: Vec<f64>,
    pub log_std: Vec<f64>,
    pub value: f64,
}

/// Activations retained for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    obs: Vec<f64>,
    h1: Vec<f64>,
    h2: Vec<f64>,
    mean: Vec<f64>,
}

impl MlpParams {
    pub fn param_count(input_dim: usize, hidden: usize, n_actions: usize) -> usize {
        Layout::new(input_dim, hidden, n_actions).len
    }

    pub fn zeros(input_dim: usize, hidden: usize, n_actions: usize) -> Self {
        Self {
            input_dim,
            hidden,
            n_actions,
            data: vec![0.0; Self::param_count(input_dim, hidden, n_actions)],
        }
    }

    /// Scaled-Gaussian initialization: unit-variance fan-in scaling for the
    /// trunk, a small policy head so initial means sit near 0.5, and the given
    /// initial log standard deviation.
    pub fn init<R: Rng + ?Sized>(
        input_dim: usize,
        hidden: usize,
        n_actions: usize,
        init_log_std: f64,
        rng: &mut R,
    ) -> Self {
        let mut p = Self::zeros(input_dim, hidden, n_actions);
        let l = p.layout();
        let mut fill = |range: std::ops::Range<usize>, fan_in: usize, gain: f64| {
            let normal = Normal::new(0.0, gain / (fan_in as f64).sqrt()).unwrap();
            for v in &mut p.data[range] {
                *v = normal.sample(rng);
            }
        };
        fill(l.w1..l.b1, input_dim, 1.0);
        fill(l.w2..l.b2, hidden, 1.0);
        fill(l.w_pi..l.b_pi, hidden, 0.01);
        fill(l.w_v..l.b_v, hidden, 1.0);
        for v in &mut p.data[l.log_std..l.log_std + n_actions] {
            *v = init_log_std;
        }
        p
    }

    fn layout(&self) -> Layout {
        Layout::new(self.input_dim, self.hidden, self.n_actions)
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.layout().len;
        if self.data.len() != expected {
            return Err(Error::Dimension {
                what: "mlp parameter vector",
                expected,
                actual: self.data.len(),
            });
        }
        if self.input_dim == 0 || self.hidden == 0 || self.n_actions == 0 {
            return Err(Error::InvalidArgument("mlp shapes must be positive".into()));
        }
        if let Some(i) = self.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mlp parameter {i} is not finite"
            )));
        }
        Ok(())
    }

    pub fn log_std(&self) -> &[f64] {
        let l = self.layout();
        &self.data[l.log_std..l.log_std + self.n_actions]
    }

    pub fn forward(&self, obs: &[f64]) -> Result<MlpOutput> {
        self.forward_cached(obs).map(|(out, _)| out)
    }

    pub fn forward_cached(&self, obs: &[f64]) -> Result<(MlpOutput, ForwardCache)> {
        if obs.len() != self.input_dim {
            return Err(Error::Dimension {
                what: "observation",
                expected: self.input_dim,
                actual: obs.len(),
            });
        }
        let l = self.layout();
        let (d, h, a) = (self.input_dim, self.hidden, self.n_actions);
        let w = &self.data;

        let h1: Vec<f64> = (0..h)
            .map(|i| {
                let row = &w[l.w1 + i * d..l.w1 + (i + 1) * d];
                let z: f64 = row.iter().zip(obs).map(|(a, b)| a * b).sum::<f64>() + w[l.b1 + i];
                z.tanh()
            })
            .collect();
        let h2: Vec<f64> = (0..h)
            .map(|i| {
                let row = &w[l.w2 + i * h..l.w2 + (i + 1) * h];
                let z: f64 = row.iter().zip(&h1).map(|(a, b)| a * b).sum::<f64>() + w[l.b2 + i];
                z.tanh()
            })
            .collect();
        let mean: Vec<f64> = (0..a)
            .map(|j| {
                let row = &w[l.w_pi + j * h..l.w_pi + (j + 1) * h];
                let z: f64 = row.iter().zip(&h2).map(|(a, b)| a * b).sum::<f64>() + w[l.b_pi + j];
                sigmoid(z)
            })
            .collect();
        let value = w[l.w_v..l.b_v]
            .iter()
            .zip(&h2)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            + w[l.b_v];
        let out = MlpOutput {
            mean: mean.clone(),
            log_std: w[l.log_std..l.log_std + a].to_vec(),
            value,
        };
        let cache = ForwardCache {
            obs: obs.to_vec(),
            h1,
            h2,
            mean,
        };
        Ok((out, cache))
    }

    /// Accumulates into `grads` the gradient of a scalar loss whose partial
    /// derivatives with respect to the outputs are `d_mean` (w.r.t. the
    /// squashed mean), `d_log_std` and `d_value`.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        d_mean: &[f64],
        d_log_std: &[f64],
        d_value: f64,
        grads: &mut [f64],
    ) {
        let l = self.layout();
        let (d, h, a) = (self.input_dim, self.hidden, self.n_actions);
        let w = &self.data;
        debug_assert_eq!(grads.len(), l.len);

        let mut dh2 = vec![0.0; h];
        for j in 0..a {
            let m = cache.mean[j];
            let dz = d_mean[j] * m * (1.0 - m);
            if dz != 0.0 {
                for i in 0..h {
                    grads[l.w_pi + j * h + i] += dz * cache.h2[i];
                    dh2[i] += dz * w[l.w_pi + j * h + i];
                }
                grads[l.b_pi + j] += dz;
            }
            grads[l.log_std + j] += d_log_std[j];
        }
        if d_value != 0.0 {
            for i in 0..h {
                grads[l.w_v + i] += d_value * cache.h2[i];
                dh2[i] += d_value * w[l.w_v + i];
            }
            grads[l.b_v] += d_value;
        }

        let mut dh1 = vec![0.0; h];
        for i in 0..h {
            let da = dh2[i] * (1.0 - cache.h2[i] * cache.h2[i]);
            if da == 0.0 {
                continue;
            }
            let row = l.w2 + i * h;
            for k in 0..h {
                grads[row + k] += da * cache.h1[k];
                dh1[k] += da * w[row + k];
            }
            grads[l.b2 + i] += da;
        }
        for k in 0..h {
            let da = dh1[k] * (1.0 - cache.h1[k] * cache.h1[k]);
            let row = l.w1 + k * d;
            for m in 0..d {
                grads[row + m] += da * cache.obs[m];
            }
            grads[l.b1 + k] += da;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn zero_network_outputs_half() {
        let p = MlpParams::zeros(3, DEFAULT_HIDDEN, 2);
        let out = p.forward(&[0.3, 0.2, 0.9]).unwrap();
        assert_eq!(out.mean, vec![0.5, 0.5]);
        assert_eq!(out.value, 0.0);
        assert_eq!(out.log_std, vec![0.0, 0.0]);
    }

    #[test]
    fn forward_is_deterministic() {
        let p = MlpParams::init(3, DEFAULT_HIDDEN, 2, -0.5, &mut rng_from_seed(4));
        let obs = [0.1, 0.7, 0.4];
        assert_eq!(p.forward(&obs).unwrap(), p.forward(&obs).unwrap());
        assert_eq!(p.log_std(), &[-0.5, -0.5]);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let p = MlpParams::zeros(3, 4, 2);
        assert!(matches!(p.forward(&[0.1]), Err(Error::Dimension { .. })));
        let mut q = p.clone();
        q.data.pop();
        assert!(q.validate().is_err());
        let mut q = p.clone();
        q.data[0] = f64::NAN;
        assert!(q.validate().is_err());
        p.validate().unwrap();
    }

    /// Central-difference oracle for a fixed linear functional of the outputs.
    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = rng_from_seed(11);
        for trial in 0..100 {
            let d = 1 + trial % 3;
            let a = 1 + trial % 2;
            let h = 4 + trial % 5;
            let mut p = MlpParams::init(d, h, a, -0.3, &mut rng);
            // larger head weights so the squashing is exercised
            for v in p.data.iter_mut() {
                *v *= 1.0 + rng.random::<f64>();
            }
            let obs: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            let cm: Vec<f64> = (0..a).map(|_| rng.random::<f64>() - 0.5).collect();
            let cs: Vec<f64> = (0..a).map(|_| rng.random::<f64>() - 0.5).collect();
            let cv = rng.random::<f64>() - 0.5;
            let loss = |p: &MlpParams| {
                let o = p.forward(&obs).unwrap();
                o.mean.iter().zip(&cm).map(|(x, c)| x * c).sum::<f64>()
                    + o.log_std.iter().zip(&cs).map(|(x, c)| x * c).sum::<f64>()
                    + cv * o.value
            };
            let (_, cache) = p.forward_cached(&obs).unwrap();
            let mut g = vec![0.0; p.data.len()];
            p.backward(&cache, &cm, &cs, cv, &mut g);
            let eps = 1e-6;
            for i in 0..p.data.len() {
                let orig = p.data[i];
                p.data[i] = orig + eps;
                let up = loss(&p);
                p.data[i] = orig - eps;
                let down = loss(&p);
                p.data[i] = orig;
                let fd = (up - down) / (2.0 * eps);
                let err = (fd - g[i]).abs() / fd.abs().max(g[i].abs()).max(1e-4);
                assert!(err < 1e-5, "trial {trial} param {i}: fd {fd} vs {}", g[i]);
            }
        }
    }
}
