use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{ChannelSet, NORMALIZED_NOISE};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::SchedulingMatrix;
use crate::objectives::lmmse_weights;
use crate::rng::{stream, Purpose};

use super::Modulation;

/// One slot of one Monte-Carlo trial, restricted to the UEs active in it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub slot: usize,
    pub ues: Vec<usize>,
    /// Transmitted symbol indices.
    pub sent: Vec<usize>,
    /// Hard decisions on the equalized symbols.
    pub detected: Vec<usize>,
    pub symbols: Vec<Complex64>,
    /// `Wᴴ y` for the active UEs.
    pub estimates: Vec<Complex64>,
}

struct SlotLink {
    ues: Vec<usize>,
    /// True channel columns of the active UEs.
    h: CMatrix,
    /// Equalizer columns of the active UEs, built from the estimate.
    w: CMatrix,
}

/// Iterator over the trial records of a schedule on one channel realization.
pub struct MonteCarlo<'a> {
    modulation: &'a Modulation,
    slots: Vec<Option<SlotLink>>,
    trials: usize,
    seed: u64,
    trial: usize,
    slot: usize,
}

/// Simulates `trials` transmissions of the schedule `c` over `channel`.
///
/// Each trial draws uniform symbols for the UEs active in a slot, sends them
/// through `y = H D s + n` with unit-variance noise, and equalizes with the
/// LMMSE filter computed from the channel estimate. Trial `i`, slot `t` uses
/// the random stream keyed by `(seed, i, t)`.
pub fn run_monte_carlo<'a>(
    channel: &ChannelSet,
    c: &SchedulingMatrix,
    modulation: &'a Modulation,
    trials: usize,
    seed: u64,
) -> Result<MonteCarlo<'a>> {
    if !c.is_binary() {
        return Err(Error::InvalidMatrix("Monte-Carlo evaluation needs a binary schedule".into()));
    }
    if c.ues() != channel.ues() {
        return Err(Error::Dimension(format!("schedule has {} UEs, channel has {}", c.ues(), channel.ues())));
    }
    let mut slots = Vec::with_capacity(c.slots());
    for t in 0..c.slots() {
        let mask = c.column(t);
        let ues: Vec<usize> = (0..c.ues()).filter(|&u| mask[u] == 1.0).collect();
        if ues.is_empty() {
            slots.push(None);
            continue;
        }
        let w_all = lmmse_weights(&channel.hhat, &mask, NORMALIZED_NOISE)?;
        let h = channel.h.select_columns(&ues);
        let w = w_all.select_columns(&ues);
        slots.push(Some(SlotLink { ues, h, w }));
    }
    Ok(MonteCarlo { modulation, slots, trials, seed, trial: 0, slot: 0 })
}

impl MonteCarlo<'_> {
    fn simulate(&self, trial: usize, slot: usize, link: &SlotLink) -> TrialRecord {
        let mut rng = stream(self.seed, Purpose::Payload, &[trial as u64, slot as u64]);
        let order = self.modulation.order();
        let sent: Vec<usize> = link.ues.iter().map(|_| rng.random_range(0..order)).collect();
        let symbols: Vec<Complex64> = sent.iter().map(|&i| self.modulation.symbol(i)).collect();
        let sigma = (NORMALIZED_NOISE / 2.0).sqrt();
        let b = link.h.nrows();
        let mut y = vec![Complex64::new(0.0, 0.0); b];
        for (k, s) in symbols.iter().enumerate() {
            for (yb, hb) in y.iter_mut().zip(link.h.column(k).iter()) {
                *yb += hb * s;
            }
        }
        for yb in y.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *yb += Complex64::new(re, im) * sigma;
        }
        let estimates: Vec<Complex64> = (0..link.ues.len())
            .map(|k| link.w.column(k).iter().zip(&y).map(|(w, yb)| w.conj() * yb).sum())
            .collect();
        let detected = estimates.iter().map(|&z| self.modulation.demap(z)).collect();
        TrialRecord { trial, slot, ues: link.ues.clone(), sent, detected, symbols, estimates }
    }
}

impl Iterator for MonteCarlo<'_> {
    type Item = TrialRecord;

    fn next(&mut self) -> Option<TrialRecord> {
        if self.slots.is_empty() {
            return None;
        }
        while self.trial < self.trials {
            let (trial, slot) = (self.trial, self.slot);
            self.slot += 1;
            if self.slot == self.slots.len() {
                self.slot = 0;
                self.trial += 1;
            }
            if let Some(link) = &self.slots[slot] {
                return Some(self.simulate(trial, slot, link));
            }
        }
        None
    }
}
