use num_complex::Complex64;
use serde::Serialize;

use crate::channel::{ChannelSet, NORMALIZED_NOISE};
use crate::error::{Error, Result};
use crate::model::SchedulingMatrix;
use crate::objectives::lmmse_weights;

use super::{run_monte_carlo, Modulation, TrialRecord};

/// Per-UE link metrics; `None` for UEs that are never active.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UeMetrics {
    pub ber: Option<f64>,
    /// Hard-output mutual information, bits per symbol.
    pub hmi: Option<f64>,
    pub mse: Option<f64>,
    /// Bits per channel use, summed over slots.
    pub rate: f64,
}

impl UeMetrics {
    pub fn mse_db(&self) -> Option<f64> {
        self.mse.map(|m| 10.0 * m.log10())
    }
}

#[derive(Debug, Clone, Default)]
struct UeTally {
    symbols: u64,
    bit_errors: u64,
    squared_error: f64,
    /// `joint[i][b][b̂]`: occurrences of sent bit `b` detected as `b̂` at position `i`.
    joint: Vec<[[u64; 2]; 2]>,
}

/// Accumulates trial records into per-UE BER, HMI and MSE.
#[derive(Debug, Clone)]
pub struct MetricAccumulator {
    bits: usize,
    tallies: Vec<UeTally>,
}

impl MetricAccumulator {
    pub fn new(ues: usize, bits_per_symbol: usize) -> Self {
        let tally = UeTally { joint: vec![[[0; 2]; 2]; bits_per_symbol], ..UeTally::default() };
        Self { bits: bits_per_symbol, tallies: vec![tally; ues] }
    }

    pub fn add(&mut self, record: &TrialRecord, modulation: &Modulation) {
        for (k, &u) in record.ues.iter().enumerate() {
            let tally = &mut self.tallies[u];
            let (sent, detected) = (record.sent[k], record.detected[k]);
            tally.symbols += 1;
            tally.bit_errors += u64::from((sent ^ detected).count_ones());
            tally.squared_error += (record.symbols[k] - record.estimates[k]).norm_sqr();
            for i in 0..self.bits {
                let (b, bh) = (modulation.bit(sent, i), modulation.bit(detected, i));
                tally.joint[i][b as usize][bh as usize] += 1;
            }
        }
    }

    /// Adds the tallies of another accumulator over the same UEs.
    pub fn merge(&mut self, other: &MetricAccumulator) {
        for (a, b) in self.tallies.iter_mut().zip(&other.tallies) {
            a.symbols += b.symbols;
            a.bit_errors += b.bit_errors;
            a.squared_error += b.squared_error;
            for (ja, jb) in a.joint.iter_mut().zip(&b.joint) {
                for x in 0..2 {
                    for y in 0..2 {
                        ja[x][y] += jb[x][y];
                    }
                }
            }
        }
    }

    pub fn ber(&self, ue: usize) -> Option<f64> {
        let t = &self.tallies[ue];
        (t.symbols > 0).then(|| t.bit_errors as f64 / (t.symbols as f64 * self.bits as f64))
    }

    pub fn mse(&self, ue: usize) -> Option<f64> {
        let t = &self.tallies[ue];
        (t.symbols > 0).then(|| t.squared_error / t.symbols as f64)
    }

    /// `Σ_i [1 - H(b_i | b̂_i)]` with the conditional entropy estimated from
    /// the empirical joint distribution of sent and detected bits.
    pub fn hmi(&self, ue: usize) -> Option<f64> {
        let t = &self.tallies[ue];
        if t.symbols == 0 {
            return None;
        }
        let n = t.symbols as f64;
        let mut total = 0.0;
        for joint in &t.joint {
            let mut conditional = 0.0;
            for bh in 0..2 {
                let detected = (joint[0][bh] + joint[1][bh]) as f64;
                for row in joint {
                    let count = row[bh] as f64;
                    if count > 0.0 {
                        conditional -= count / n * (count / detected).log2();
                    }
                }
            }
            total += 1.0 - conditional;
        }
        Some(total.clamp(0.0, self.bits as f64))
    }
}

/// Per-UE achievable rate `Σ_t log2(1 + Ω_u(c_t))` with the realized
/// estimation error in the interference term; inactive slots add nothing.
pub fn achievable_rate(channel: &ChannelSet, c: &SchedulingMatrix) -> Result<Vec<f64>> {
    if c.ues() != channel.ues() {
        return Err(Error::Dimension(format!("schedule has {} UEs, channel has {}", c.ues(), channel.ues())));
    }
    let (ues, b) = (channel.ues(), channel.antennas());
    let n0 = NORMALIZED_NOISE;
    let mut rate = vec![0.0; ues];
    for t in 0..c.slots() {
        let mask = c.column(t);
        let w = lmmse_weights(&channel.hhat, &mask, n0)?;
        let project = |u: usize, col: &dyn Fn(usize) -> Complex64| -> Complex64 {
            (0..b).map(|k| w[(k, u)].conj() * col(k)).sum()
        };
        for u in 0..ues {
            if mask[u] == 0.0 {
                continue;
            }
            let signal = project(u, &|k| channel.hhat[(k, u)] * mask[u]).norm_sqr();
            let mut denominator = n0 * w.column(u).norm_squared();
            for j in 0..ues {
                if mask[j] == 0.0 {
                    continue;
                }
                if j != u {
                    denominator += project(u, &|k| channel.hhat[(k, j)] * mask[j]).norm_sqr();
                }
                denominator += project(u, &|k| channel.error[(k, j)] * mask[j]).norm_sqr();
            }
            if denominator > 0.0 {
                rate[u] += (1.0 + signal / denominator).log2();
            }
        }
    }
    Ok(rate)
}

/// Runs the Monte-Carlo link simulation and collects all per-UE metrics.
pub fn evaluate(
    channel: &ChannelSet,
    c: &SchedulingMatrix,
    modulation: &Modulation,
    trials: usize,
    seed: u64,
) -> Result<Vec<UeMetrics>> {
    let mut acc = MetricAccumulator::new(channel.ues(), modulation.bits_per_symbol());
    for record in run_monte_carlo(channel, c, modulation, trials, seed)? {
        acc.add(&record, modulation);
    }
    let rate = achievable_rate(channel, c)?;
    Ok((0..channel.ues())
        .map(|u| UeMetrics { ber: acc.ber(u), hmi: acc.hmi(u), mse: acc.mse(u), rate: rate[u] })
        .collect())
}
