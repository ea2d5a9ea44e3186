//! Two-sample comparisons of mean rewards.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::eval::mean_sd;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub mean_diff: f64,
    pub t: f64,
    pub df: f64,
    /// One-sided p-value for `mean(a) > mean(b)`.
    pub p_greater: f64,
    /// Two-sided 95% interval for `mean(a) - mean(b)`.
    pub ci95: (f64, f64),
}

/// Welch's unequal-variance t-test of `a` against `b`.
pub fn welch(a: &[f64], b: &[f64]) -> WelchResult {
    let (ma, sa) = mean_sd(a);
    let (mb, sb) = mean_sd(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let va = sa * sa / na;
    let vb = sb * sb / nb;
    let se = (va + vb).sqrt();
    let diff = ma - mb;
    if se == 0.0 {
        let p = if diff > 0.0 { 0.0 } else { 1.0 };
        return WelchResult {
            mean_diff: diff,
            t: f64::INFINITY * diff.signum(),
            df: f64::INFINITY,
            p_greater: p,
            ci95: (diff, diff),
        };
    }
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let t = diff / se;
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    let q = dist.inverse_cdf(0.975);
    WelchResult {
        mean_diff: diff,
        t,
        df,
        p_greater: 1.0 - dist.cdf(t),
        ci95: (diff - q * se, diff + q * se),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clearly_separated_samples() {
        let a: Vec<f64> = (0..50).map(|i| 10.0 + (i % 5) as f64 * 0.1).collect();
        let b: Vec<f64> = (0..50).map(|i| 5.0 + (i % 7) as f64 * 0.1).collect();
        let r = welch(&a, &b);
        assert!(r.p_greater < 1e-10);
        assert!(r.ci95.0 > 0.0);
        let r = welch(&b, &a);
        assert!(r.p_greater > 1.0 - 1e-10);
    }

    #[test]
    fn identical_samples_give_half() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = welch(&a, &a);
        assert!((r.p_greater - 0.5).abs() < 1e-12);
        assert!(r.ci95.0 < 0.0 && r.ci95.1 > 0.0);
    }

    #[test]
    fn known_values() {
        // a = {1,2,3,4}, b = {2,4,6,8}: diff -2.5, se = sqrt(5/12 + 20/12)
        let r = welch(&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 6.0, 8.0]);
        let se = (25.0f64 / 12.0).sqrt();
        assert!((r.t + 2.5 / se).abs() < 1e-12);
        // df = (25/12)^2 / ((5/12)^2/3 + (20/12)^2/3)
        let df = (25.0f64 / 12.0).powi(2) / ((5.0f64 / 12.0).powi(2) / 3.0 + (20.0f64 / 12.0).powi(2) / 3.0);
        assert!((r.df - df).abs() < 1e-12);
    }
}
