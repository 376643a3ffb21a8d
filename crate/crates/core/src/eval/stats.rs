//! Empirical distribution summaries of per-UE metrics.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{stream, Purpose};

/// Which tail a percentile summary looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Smallest `x` with `Pr[X ≤ x] ≥ 0.9`; lower is better (BER, MSE).
    Cdf,
    /// Largest `x` with `Pr[X > x] ≥ 0.9`; higher is better (HMI, rate).
    Ccdf,
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Nearest-rank 90th percentile in the given direction; `None` for no samples.
///
/// For the CCDF, when no sample has 90% of the others strictly above it (for
/// instance with heavy ties), the minimum sample is returned.
pub fn percentile90(samples: &[f64], direction: Direction) -> Option<f64> {
    if samples.is_empty() {
        return None;
    }
    let s = sorted(samples);
    let n = s.len();
    match direction {
        Direction::Cdf => {
            // count(≤ x) ≥ 0.9 n  ⇔  10 count ≥ 9 n
            let rank = (9 * n).div_ceil(10).max(1);
            Some(s[rank - 1])
        }
        Direction::Ccdf => {
            let mut best = None;
            let mut i = 0;
            while i < n {
                let mut j = i;
                while j + 1 < n && s[j + 1] == s[i] {
                    j += 1;
                }
                let above = n - j - 1;
                if 10 * above >= 9 * n {
                    best = Some(s[i]);
                }
                i = j + 1;
            }
            Some(best.unwrap_or(s[0]))
        }
    }
}

/// Empirical CDF points `(x, Pr[X ≤ x])` or CCDF points `(x, Pr[X > x])`.
pub fn empirical_curve(samples: &[f64], direction: Direction) -> Vec<(f64, f64)> {
    let s = sorted(samples);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .filter(|&(i, x)| i + 1 == s.len() || s[i + 1] != *x)
        .map(|(i, &x)| {
            let at_or_below = (i + 1) as f64 / n;
            (x, if direction == Direction::Cdf { at_or_below } else { 1.0 - at_or_below })
        })
        .collect()
}

/// Paired bootstrap over realizations for a difference of 90th percentiles.
///
/// `a[r]` and `b[r]` hold the per-UE samples of two methods on realization
/// `r`. Each resample draws realizations with replacement and pools their
/// samples. Returns the fraction of resamples in which `a` is *not* better
/// than `b` (better means lower for [`Direction::Cdf`], higher for
/// [`Direction::Ccdf`]); values below 0.05 indicate `a` is better at the 5% level.
pub fn bootstrap_not_better(a: &[Vec<f64>], b: &[Vec<f64>], direction: Direction, resamples: usize, seed: u64) -> f64 {
    assert_eq!(a.len(), b.len(), "paired samples need equal realization counts");
    let r = a.len();
    if r == 0 || resamples == 0 {
        return 1.0;
    }
    let mut rng = stream(seed, Purpose::Bootstrap, &[]);
    let mut not_better = 0usize;
    let (mut pa, mut pb) = (Vec::new(), Vec::new());
    for _ in 0..resamples {
        pa.clear();
        pb.clear();
        for _ in 0..r {
            let k = rng.random_range(0..r);
            pa.extend_from_slice(&a[k]);
            pb.extend_from_slice(&b[k]);
        }
        let (Some(qa), Some(qb)) = (percentile90(&pa, direction), percentile90(&pb, direction)) else {
            not_better += 1;
            continue;
        };
        let better = match direction {
            Direction::Cdf => qa < qb,
            Direction::Ccdf => qa > qb,
        };
        if !better {
            not_better += 1;
        }
    }
    not_better as f64 / resamples as f64
}
