use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::EvalSummary;

pub const LENGTH_BIN_WIDTH: usize = 10;
pub const REWARD_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    /// `(length, total reward)` per episode, in episode order.
    pub pairs: Vec<(usize, f64)>,
    pub length_bins: Vec<Bin>,
    pub reward_bins: Vec<Bin>,
}

/// Episode lengths binned by tens over `[0, horizon]` (the last bin closed)
/// and rewards in 20 equal bins over the observed range.
pub fn emit_histogram_data(summary: &EvalSummary, horizon: usize) -> Result<HistogramData> {
    if summary.episodes.is_empty() {
        return Err(Error::InvalidArgument("histogram of an empty summary".into()));
    }
    let pairs: Vec<(usize, f64)> = summary
        .episodes
        .iter()
        .map(|e| (e.length, e.total_reward))
        .collect();

    let n_len = horizon.div_ceil(LENGTH_BIN_WIDTH).max(1);
    let mut length_bins: Vec<Bin> = (0..n_len)
        .map(|i| Bin {
            lo: (i * LENGTH_BIN_WIDTH) as f64,
            hi: ((i + 1) * LENGTH_BIN_WIDTH).min(horizon) as f64,
            count: 0,
        })
        .collect();
    for &(len, _) in &pairs {
        let i = (len / LENGTH_BIN_WIDTH).min(n_len - 1);
        length_bins[i].count += 1;
    }

    let lo = pairs.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = pairs.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / REWARD_BINS as f64;
    let mut reward_bins: Vec<Bin> = (0..REWARD_BINS)
        .map(|i| Bin {
            lo: lo + width * i as f64,
            hi: if i + 1 == REWARD_BINS { hi } else { lo + width * (i + 1) as f64 },
            count: 0,
        })
        .collect();
    for &(_, r) in &pairs {
        let i = if width > 0.0 {
            (((r - lo) / width) as usize).min(REWARD_BINS - 1)
        } else {
            0
        };
        reward_bins[i].count += 1;
    }
    Ok(HistogramData {
        pairs,
        length_bins,
        reward_bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Termination;
    use crate::harness::EpisodeOutcome;

    fn summary(eps: &[(usize, f64)]) -> EvalSummary {
        EvalSummary::from_episodes(
            eps.iter()
                .map(|&(length, total_reward)| EpisodeOutcome {
                    total_reward,
                    harvest: total_reward.max(0.0),
                    length,
                    cause: if length == 200 {
                        Termination::Horizon
                    } else {
                        Termination::NearExtinction { species: 0 }
                    },
                })
                .collect(),
        )
    }

    #[test]
    fn full_length_episodes_fill_last_bin() {
        let h = emit_histogram_data(&summary(&[(200, 1.0); 30]), 200).unwrap();
        assert_eq!(h.length_bins.len(), 20);
        let nonzero: Vec<&Bin> = h.length_bins.iter().filter(|b| b.count > 0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!((nonzero[0].lo, nonzero[0].hi), (190.0, 200.0));
        assert_eq!(h.reward_bins[0].count, 30);
    }

    #[test]
    fn counts_sum_to_episodes() {
        let eps: Vec<(usize, f64)> = (0..100).map(|i| (1 + (i * 7) % 200, i as f64 * 0.37 - 10.0)).collect();
        let h = emit_histogram_data(&summary(&eps), 200).unwrap();
        assert_eq!(h.pairs.len(), 100);
        assert_eq!(h.length_bins.iter().map(|b| b.count).sum::<usize>(), 100);
        assert_eq!(h.reward_bins.iter().map(|b| b.count).sum::<usize>(), 100);
        assert_eq!(h.reward_bins.len(), 20);
        assert_eq!(h.reward_bins[19].hi, 99.0 * 0.37 - 10.0);
        assert!(h.reward_bins[19].count >= 1);
    }
}
