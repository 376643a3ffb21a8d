//! Core domain types: scenarios, constraint boxes and scheduling matrices.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// System dimensions and link-budget parameters of one scheduling problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Receive antennas, `aps * antennas_per_ap`.
    pub antennas: usize,
    pub aps: usize,
    pub antennas_per_ap: usize,
    pub ues: usize,
    pub slots: usize,
    /// Per-UE transmit power in watts.
    pub tx_power: f64,
    /// Power-control dynamic range in dB.
    pub eta_db: f64,
    /// Physical noise power in watts.
    pub noise_power: f64,
    /// Bits per modulation symbol.
    pub bits_per_symbol: u32,
    /// Number of random solver restarts.
    pub restarts: usize,
}

impl Default for Scenario {
    /// The single-array mmWave setup: 16 antennas, 16 UEs, two slots.
    fn default() -> Self {
        Self {
            antennas: 16,
            aps: 1,
            antennas_per_ap: 16,
            ues: 16,
            slots: 2,
            tx_power: 0.1,
            eta_db: 6.0,
            noise_power: crate::channel::noise_power(&crate::channel::NoiseModel::default()),
            bits_per_symbol: 2,
            restarts: 8,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if self.antennas == 0 || self.aps == 0 || self.antennas_per_ap == 0 {
            return bad("antenna counts must be at least 1".into());
        }
        if self.antennas != self.aps * self.antennas_per_ap {
            return bad(format!(
                "B={} but L*n_A={}*{}",
                self.antennas, self.aps, self.antennas_per_ap
            ));
        }
        if self.ues == 0 || self.slots == 0 || self.restarts == 0 {
            return bad("U, T and K_init must be at least 1".into());
        }
        if !(self.tx_power > 0.0 && self.tx_power.is_finite()) {
            return bad(format!("transmit power {} must be positive", self.tx_power));
        }
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return bad(format!("noise power {} must be positive", self.noise_power));
        }
        if !(self.eta_db >= 0.0) {
            return bad(format!("eta {} dB must be non-negative", self.eta_db));
        }
        if !matches!(self.bits_per_symbol, 2 | 4 | 6) {
            return bad(format!("Q={} is not one of 2, 4, 6", self.bits_per_symbol));
        }
        Ok(())
    }
}

/// Bounds on active UEs per slot (`ue_*`) and active slots per UE (`slot_*`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintBox {
    pub ue_min: usize,
    pub ue_max: usize,
    pub slot_min: usize,
    pub slot_max: usize,
}

impl ConstraintBox {
    pub fn new(ue_min: usize, ue_max: usize, slot_min: usize, slot_max: usize) -> Result<Self> {
        if ue_min > ue_max || slot_min > slot_max {
            return Err(Error::InvalidBox(format!(
                "({ue_min},{ue_max},{slot_min},{slot_max}) has a lower bound above its upper bound"
            )));
        }
        Ok(Self {
            ue_min,
            ue_max,
            slot_min,
            slot_max,
        })
    }

    /// The box that imposes nothing beyond `[0,1]` entries.
    pub fn unconstrained(ues: usize, slots: usize) -> Self {
        Self {
            ue_min: 0,
            ue_max: ues,
            slot_min: 0,
            slot_max: slots,
        }
    }

    /// Checks the bounds against the problem dimensions and the joint-feasibility precheck.
    pub fn validate_for(&self, ues: usize, slots: usize) -> Result<()> {
        if self.ue_max > ues || self.slot_max > slots {
            return Err(Error::InvalidBox(format!(
                "{self} exceeds the problem size U={ues}, T={slots}"
            )));
        }
        if !feasibility_precheck(ues, slots, self) {
            return Err(Error::Infeasible {
                bounds: self.to_string(),
                ues,
                slots,
            });
        }
        Ok(())
    }
}

impl fmt::Display for ConstraintBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.ue_min, self.ue_max, self.slot_min, self.slot_max
        )
    }
}

/// Necessary condition for a binary `U x T` matrix to satisfy `bounds`.
pub fn feasibility_precheck(ues: usize, slots: usize, bounds: &ConstraintBox) -> bool {
    bounds.ue_min <= bounds.ue_max
        && bounds.slot_min <= bounds.slot_max
        && bounds.ue_min * slots <= bounds.slot_max * ues
        && bounds.slot_min * ues <= bounds.ue_max * slots
}

/// Whether a scheduling matrix holds relaxed or binary entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixState {
    Relaxed,
    Binary,
}

/// The `U x T` scheduling matrix; entry `(u, t)` says whether UE `u` is active in slot `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulingMatrix {
    entries: DMatrix<f64>,
    state: MatrixState,
}

impl SchedulingMatrix {
    /// Wraps a relaxed matrix; every entry must lie in `[0, 1]`.
    pub fn relaxed(entries: DMatrix<f64>) -> Result<Self> {
        if let Some(x) = entries.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidMatrix(format!("relaxed entry {x} outside [0,1]")));
        }
        Ok(Self {
            entries,
            state: MatrixState::Relaxed,
        })
    }

    /// Wraps a binary matrix; every entry must be exactly 0 or 1.
    pub fn binary(entries: DMatrix<f64>) -> Result<Self> {
        if let Some(x) = entries.iter().find(|x| **x != 0.0 && **x != 1.0) {
            return Err(Error::InvalidMatrix(format!("entry {x} is not binary")));
        }
        Ok(Self {
            entries,
            state: MatrixState::Binary,
        })
    }

    /// Builds a binary matrix from rows of 0/1 flags.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let ues = rows.len();
        let slots = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != slots) {
            return Err(Error::Dimension("ragged schedule rows".into()));
        }
        let entries = DMatrix::from_fn(ues, slots, |u, t| f64::from(rows[u][t]));
        Self::binary(entries)
    }

    pub fn zeros(ues: usize, slots: usize) -> Self {
        Self {
            entries: DMatrix::zeros(ues, slots),
            state: MatrixState::Binary,
        }
    }

    pub fn ones(ues: usize, slots: usize) -> Self {
        Self {
            entries: DMatrix::from_element(ues, slots, 1.0),
            state: MatrixState::Binary,
        }
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn state(&self) -> MatrixState {
        self.state
    }

    pub fn is_binary(&self) -> bool {
        self.state == MatrixState::Binary
    }

    /// True when every entry is 0 or 1, whatever the tag says.
    pub fn has_binary_values(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0 || x == 1.0)
    }

    pub fn ues(&self) -> usize {
        self.entries.nrows()
    }

    pub fn slots(&self) -> usize {
        self.entries.ncols()
    }

    pub fn get(&self, ue: usize, slot: usize) -> f64 {
        self.entries[(ue, slot)]
    }

    pub fn column(&self, slot: usize) -> Vec<f64> {
        self.entries.column(slot).iter().copied().collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.row_iter().map(|r| r.sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        self.entries.column_iter().map(|c| c.sum()).collect()
    }

    pub fn mask(&self, slot: usize) -> MaskView {
        MaskView {
            slot,
            diagonal: self.column(slot),
        }
    }

    /// Row `u` as a string of 0/1 characters, one per slot.
    pub fn row_pattern(&self, ue: usize) -> String {
        self.entries
            .row(ue)
            .iter()
            .map(|&x| if x == 1.0 { '1' } else { '0' })
            .collect()
    }

    /// Parses whitespace-delimited 0/1 entries, one line per UE.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| match tok {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(Error::Parse(format!(
                        "line {}: expected 0 or 1, found {other:?}",
                        lineno + 1
                    ))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty schedule".into()));
        }
        Self::from_rows(&rows)
    }

    /// Inverse of [`SchedulingMatrix::parse_text`] for binary matrices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for u in 0..self.ues() {
            let row: Vec<&str> = (0..self.slots())
                .map(|t| if self.get(u, t) == 1.0 { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// The diagonal mask `diag(c_t)` of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskView {
    pub slot: usize,
    pub diagonal: Vec<f64>,
}

/// Checks the per-slot and per-UE count bounds of a binary schedule.
///
/// Returns `false` for matrices tagged as relaxed.
pub fn is_feasible(c: &SchedulingMatrix, bounds: &ConstraintBox) -> bool {
    if !c.is_binary() {
        return false;
    }
    let in_range = |x: f64, lo: usize, hi: usize| x >= lo as f64 && x <= hi as f64;
    c.column_sums()
        .into_iter()
        .all(|s| in_range(s, bounds.ue_min, bounds.ue_max))
        && c.row_sums()
            .into_iter()
            .all(|s| in_range(s, bounds.slot_min, bounds.slot_max))
}

/// Scales column `u` of the channel estimate by `c_t[u]`.
pub fn mask_channel(hhat: &CMatrix, c_t: &[f64]) -> Result<CMatrix> {
    if hhat.ncols() != c_t.len() {
        return Err(Error::Dimension(format!(
            "channel has {} columns but the mask has {} entries",
            hhat.ncols(),
            c_t.len()
        )));
    }
    let mut out = hhat.clone();
    for (mut col, &w) in out.column_iter_mut().zip(c_t) {
        col *= Complex64::new(w, 0.0);
    }
    Ok(out)
}
