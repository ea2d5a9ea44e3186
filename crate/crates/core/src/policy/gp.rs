//! Gaussian-process regression with an RBF plus white-noise kernel.
//!
//! Only the predictive mean is needed for acting, so a fitted regressor keeps
//! the weight vector `alpha = (K + noise I)^{-1} y` obtained from a Cholesky
//! factorization, and predicts `k(x, X) alpha`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INITIAL_JITTER: f64 = 1e-10;
const MAX_JITTER: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelParams {
    pub length_scale: f64,
    pub noise_level: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            length_scale: 10.0,
            noise_level: 0.1,
        }
    }
}

impl KernelParams {
    pub fn rbf(&self, a: &[f64], b: &[f64]) -> f64 {
        let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        (-0.5 * d2 / (self.length_scale * self.length_scale)).exp()
    }
}

/// Single-output GP regressor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpRegressor {
    pub kernel: KernelParams,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    /// Solved weights; empty when unfitted.
    #[serde(default)]
    pub alpha: Vec<f64>,
}

impl GpRegressor {
    pub fn unfitted(kernel: KernelParams, inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Self {
        Self {
            kernel,
            inputs,
            targets,
            alpha: Vec::new(),
        }
    }

    pub fn fit(kernel: KernelParams, inputs: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self> {
        let mut gp = Self::unfitted(kernel, inputs, targets);
        gp.refit()?;
        Ok(gp)
    }

    pub fn is_fitted(&self) -> bool {
        !self.inputs.is_empty() && self.alpha.len() == self.inputs.len()
    }

    /// Factorizes `K + noise I`, adding escalating jitter if the matrix is not
    /// numerically positive definite.
    pub fn refit(&mut self) -> Result<()> {
        let n = self.inputs.len();
        if n == 0 || self.targets.len() != n {
            return Err(Error::Dimension {
                what: "gp targets",
                expected: n,
                actual: self.targets.len(),
            });
        }
        if !(self.kernel.length_scale > 0.0 && self.kernel.noise_level >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "invalid kernel {:?}",
                self.kernel
            )));
        }
        let mut k = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = self.kernel.rbf(&self.inputs[i], &self.inputs[j]);
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
            k[(i, i)] += self.kernel.noise_level;
        }
        let y = DVector::from_column_slice(&self.targets);

        let mut jitter = 0.0;
        loop {
            let mut kj = k.clone();
            if jitter > 0.0 {
                for i in 0..n {
                    kj[(i, i)] += jitter;
                }
            }
            if let Some(chol) = kj.cholesky() {
                let alpha = chol.solve(&y);
                if alpha.iter().all(|v| v.is_finite()) {
                    self.alpha = alpha.as_slice().to_vec();
                    return Ok(());
                }
            }
            jitter = if jitter == 0.0 {
                INITIAL_JITTER
            } else {
                jitter * 10.0
            };
            if jitter > MAX_JITTER {
                return Err(Error::Factorization { jitter: jitter / 10.0 });
            }
            log::debug!("gp factorization retry with jitter {jitter:e}");
        }
    }

    /// Posterior mean at `x` (unclamped).
    pub fn predict_mean(&self, x: &[f64]) -> Result<f64> {
        if !self.is_fitted() {
            return Err(Error::GpNotFitted);
        }
        if x.len() != self.inputs[0].len() {
            return Err(Error::Dimension {
                what: "gp query",
                expected: self.inputs[0].len(),
                actual: x.len(),
            });
        }
        Ok(self
            .inputs
            .iter()
            .zip(&self.alpha)
            .map(|(xi, a)| self.kernel.rbf(x, xi) * a)
            .sum())
    }
}

/// One GP regressor per harvested species; predictions are mortalities
/// clamped to `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpPolicy {
    pub regressors: Vec<GpRegressor>,
}

impl GpPolicy {
    pub fn predict(&self, obs: &[f64]) -> Result<Vec<f64>> {
        if self.regressors.is_empty() {
            return Err(Error::GpNotFitted);
        }
        self.regressors
            .iter()
            .map(|r| r.predict_mean(obs).map(|m| m.clamp(0.0, 1.0)))
            .collect()
    }

    pub fn predict_batch(&self, queries: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        queries.iter().map(|q| self.predict(q)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.regressors.is_empty() || self.regressors.iter().any(|r| !r.is_fitted()) {
            return Err(Error::GpNotFitted);
        }
        for r in &self.regressors {
            if r.targets.iter().any(|t| !(0.0..=1.0).contains(t)) {
                return Err(Error::InvalidArgument(
                    "gp policy targets must lie in [0, 1]".into(),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense Gaussian elimination with partial pivoting, used as an oracle
    /// independent of the Cholesky path.
    fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in col + 1..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    fn five_points() -> (Vec<Vec<f64>>, Vec<f64>) {
        let xs = vec![
            vec![0.1, 0.2],
            vec![0.4, 0.9],
            vec![0.5, 0.5],
            vec![0.8, 0.1],
            vec![0.95, 0.7],
        ];
        let ys = vec![0.1, 0.4, 0.3, 0.7, 0.2];
        (xs, ys)
    }

    #[test]
    fn matches_direct_linear_algebra_oracle() {
        let (xs, ys) = five_points();
        let kernel = KernelParams {
            length_scale: 0.3,
            noise_level: 0.01,
        };
        let gp = GpRegressor::fit(kernel, xs.clone(), ys.clone()).unwrap();
        let kmat: Vec<Vec<f64>> = xs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                xs.iter()
                    .enumerate()
                    .map(|(j, b)| kernel.rbf(a, b) + if i == j { 0.01 } else { 0.0 })
                    .collect()
            })
            .collect();
        let alpha = gauss_solve(kmat, ys.clone());
        for q in [vec![0.3, 0.3], vec![0.5, 0.5], vec![0.9, 0.2]] {
            let want: f64 = xs.iter().zip(&alpha).map(|(x, a)| kernel.rbf(&q, x) * a).sum();
            assert!((gp.predict_mean(&q).unwrap() - want).abs() < 1e-10);
        }
        // at training inputs the prediction is within the noise level of the target
        for (x, y) in xs.iter().zip(&ys) {
            assert!((gp.predict_mean(x).unwrap() - y).abs() < 0.01 + 1e-3 * 5.0);
        }
    }

    #[test]
    fn tiny_noise_interpolates() {
        let (xs, ys) = five_points();
        let kernel = KernelParams {
            length_scale: 0.3,
            noise_level: 1e-12,
        };
        let gp = GpRegressor::fit(kernel, xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((gp.predict_mean(x).unwrap() - y).abs() < 1e-8);
        }
    }

    #[test]
    fn unfitted_and_empty_queries() {
        let (xs, ys) = five_points();
        let gp = GpRegressor::unfitted(KernelParams::default(), xs, ys);
        assert!(matches!(gp.predict_mean(&[0.1, 0.1]), Err(Error::GpNotFitted)));
        let policy = GpPolicy {
            regressors: vec![gp],
        };
        assert!(matches!(policy.predict(&[0.1, 0.1]), Err(Error::GpNotFitted)));
        assert!(policy.validate().is_err());
        assert!(policy.predict_batch(&[]).unwrap().is_empty());
    }

    #[test]
    fn predictions_are_clamped() {
        let xs = vec![vec![0.0], vec![1.0]];
        let gp = GpRegressor::fit(
            KernelParams {
                length_scale: 0.5,
                noise_level: 1e-9,
            },
            xs,
            vec![1.0, 1.0],
        )
        .unwrap();
        // RBF interpolation overshoots between two equal targets
        assert!(gp.predict_mean(&[0.5]).unwrap() > 1.0);
        let policy = GpPolicy {
            regressors: vec![gp],
        };
        assert_eq!(policy.predict(&[0.5]).unwrap(), vec![1.0]);
    }
}
