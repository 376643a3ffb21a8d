//! Reference schedulers: random partitions, all UEs active, and exhaustive search.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::model::{ConstraintBox, SchedulingMatrix};
use crate::objectives::Objective;
use crate::rng::{stream, Purpose};
use crate::solver::SolveResult;

/// Default limit on the number of schedules exhaustive search may visit.
pub const DEFAULT_ES_CAP: u64 = 10_000_000;

/// Random partition of the UEs into `slots` groups of `ues / slots` each.
pub fn random_schedule(ues: usize, slots: usize, seed: u64) -> Result<SchedulingMatrix> {
    if slots == 0 || !ues.is_multiple_of(slots) {
        return Err(Error::Indivisible { ues, slots });
    }
    let mut order: Vec<usize> = (0..ues).collect();
    order.shuffle(&mut stream(seed, Purpose::RandomBaseline, &[]));
    let per_slot = ues / slots;
    let mut c = DMatrix::zeros(ues, slots);
    for (pos, &u) in order.iter().enumerate() {
        c[(u, pos / per_slot)] = 1.0;
    }
    SchedulingMatrix::binary(c)
}

/// The box every random partition satisfies.
pub fn random_box(ues: usize, slots: usize) -> Result<ConstraintBox> {
    if slots == 0 || !ues.is_multiple_of(slots) {
        return Err(Error::Indivisible { ues, slots });
    }
    ConstraintBox::new(ues / slots, ues / slots, 1, 1)
}

/// Every UE in every slot.
pub fn aua_schedule(ues: usize, slots: usize) -> SchedulingMatrix {
    SchedulingMatrix::ones(ues, slots)
}

/// The box the all-active schedule satisfies.
pub fn aua_box(ues: usize, slots: usize) -> ConstraintBox {
    ConstraintBox { ue_min: ues, ue_max: ues, slot_min: slots, slot_max: slots }
}

/// Reads a whitespace-delimited 0/1 matrix with one row per UE.
pub fn read_schedule(path: &Path) -> Result<SchedulingMatrix> {
    SchedulingMatrix::parse_text(&std::fs::read_to_string(path)?)
}

/// Depth-first walk over all binary schedules in a box, one column bitmask per slot.
struct Enumerator<'a> {
    ues: usize,
    slots: usize,
    bounds: &'a ConstraintBox,
    rows: Vec<usize>,
    columns: Vec<u64>,
}

impl<'a> Enumerator<'a> {
    fn new(ues: usize, slots: usize, bounds: &'a ConstraintBox) -> Self {
        Self { ues, slots, bounds, rows: vec![0; ues], columns: Vec::with_capacity(slots) }
    }

    /// Forced UE mask and free UE list for the next column.
    fn candidates(&self) -> (u64, Vec<usize>) {
        let remaining = self.slots - self.columns.len() - 1;
        let mut forced = 0u64;
        let mut free = Vec::new();
        for u in 0..self.ues {
            if self.rows[u] >= self.bounds.slot_max {
                continue;
            }
            if self.rows[u] + remaining < self.bounds.slot_min {
                forced |= 1 << u;
            } else {
                free.push(u);
            }
        }
        (forced, free)
    }

    /// Range of free UEs to add on top of `n_forced`, empty if infeasible.
    fn pick_range(&self, n_forced: usize, n_free: usize) -> std::ops::RangeInclusive<usize> {
        if n_forced > self.bounds.ue_max {
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        self.bounds.ue_min.saturating_sub(n_forced)..=(self.bounds.ue_max - n_forced).min(n_free)
    }

    /// Number of complete schedules below the current prefix, stopping once past `cap`.
    fn count(&mut self, cap: u64) -> u64 {
        let (forced, free) = self.candidates();
        let range = self.pick_range(forced.count_ones() as usize, free.len());
        if self.columns.len() + 1 == self.slots {
            return range.map(|k| binomial(free.len() as u64, k as u64)).fold(0u64, u64::saturating_add);
        }
        let mut total = 0u64;
        for k in range {
            let mut pick: Vec<usize> = (0..k).collect();
            loop {
                let mask = pick.iter().fold(forced, |m, &i| m | 1 << free[i]);
                self.push(mask);
                total = total.saturating_add(self.count(cap.saturating_sub(total)));
                self.pop(mask);
                if total > cap || !next_combination(&mut pick, free.len()) {
                    break;
                }
            }
            if total > cap {
                break;
            }
        }
        total
    }

    /// Calls `visit` with each complete schedule and its cost, the sum of
    /// `score` over its columns, until `visit` or `score` returns false/None.
    fn walk(
        &mut self,
        prefix: f64,
        score: &mut dyn FnMut(u64) -> Option<f64>,
        visit: &mut dyn FnMut(&[u64], f64) -> bool,
    ) -> bool {
        let (forced, free) = self.candidates();
        let last = self.columns.len() + 1 == self.slots;
        for k in self.pick_range(forced.count_ones() as usize, free.len()) {
            let mut pick: Vec<usize> = (0..k).collect();
            loop {
                let mask = pick.iter().fold(forced, |m, &i| m | 1 << free[i]);
                let Some(cost) = score(mask) else {
                    return false;
                };
                let go_on = if last {
                    self.columns.push(mask);
                    let go_on = visit(&self.columns, prefix + cost);
                    self.columns.pop();
                    go_on
                } else {
                    self.push(mask);
                    let go_on = self.walk(prefix + cost, score, visit);
                    self.pop(mask);
                    go_on
                };
                if !go_on {
                    return false;
                }
                if !next_combination(&mut pick, free.len()) {
                    break;
                }
            }
        }
        true
    }

    fn push(&mut self, mask: u64) {
        for u in 0..self.ues {
            if mask >> u & 1 == 1 {
                self.rows[u] += 1;
            }
        }
        self.columns.push(mask);
    }

    fn pop(&mut self, mask: u64) {
        for u in 0..self.ues {
            if mask >> u & 1 == 1 {
                self.rows[u] -= 1;
            }
        }
        self.columns.pop();
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Advances `pick` to the next `k`-combination of `0..n` in lexicographic order.
fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Number of binary schedules in `bounds`, counting stops once it passes `cap`.
pub fn count_schedules(ues: usize, slots: usize, bounds: &ConstraintBox, cap: u64) -> Result<u64> {
    check_dims(ues, slots, bounds)?;
    Ok(Enumerator::new(ues, slots, bounds).count(cap))
}

fn check_dims(ues: usize, slots: usize, bounds: &ConstraintBox) -> Result<()> {
    if ues > 64 {
        return Err(Error::Dimension(format!("exhaustive search supports at most 64 UEs, got {ues}")));
    }
    if slots == 0 {
        return Err(Error::Dimension("exhaustive search needs at least one slot".into()));
    }
    if bounds.ue_max > ues || bounds.slot_max > slots {
        return Err(Error::InvalidBox(format!("{bounds} exceeds U={ues}, T={slots}")));
    }
    Ok(())
}

/// Row-major comparison of two schedules given as column bitmasks.
fn row_major_cmp(a: &[u64], b: &[u64], ues: usize) -> Ordering {
    for u in 0..ues {
        for (ca, cb) in a.iter().zip(b) {
            let (x, y) = (ca >> u & 1, cb >> u & 1);
            if x != y {
                return x.cmp(&y);
            }
        }
    }
    Ordering::Equal
}

/// Slot costs keyed by column bitmask; a flat table for small `U`.
enum SlotMemo {
    Dense(Vec<f64>),
    Sparse(HashMap<u64, f64>),
}

impl SlotMemo {
    fn new(ues: usize) -> Self {
        if ues <= 20 {
            SlotMemo::Dense(vec![f64::NAN; 1 << ues])
        } else {
            SlotMemo::Sparse(HashMap::new())
        }
    }

    fn get(&self, mask: u64) -> Option<f64> {
        match self {
            SlotMemo::Dense(v) => Some(v[mask as usize]).filter(|c| !c.is_nan()),
            SlotMemo::Sparse(m) => m.get(&mask).copied(),
        }
    }

    fn insert(&mut self, mask: u64, cost: f64) {
        match self {
            SlotMemo::Dense(v) => v[mask as usize] = cost,
            SlotMemo::Sparse(m) => {
                m.insert(mask, cost);
            }
        }
    }
}

fn mask_to_column(mask: u64, ues: usize) -> Vec<f64> {
    (0..ues).map(|u| (mask >> u & 1) as f64).collect()
}

/// Global minimizer of `F` over every binary schedule in `bounds`.
///
/// Objectives are sums of per-slot costs, so each distinct column is
/// evaluated once. Ties go to the lexicographically smallest matrix in
/// row-major order.
pub fn exhaustive_search(
    objective: &dyn Objective,
    channel: &ChannelSet,
    bounds: &ConstraintBox,
    slots: usize,
    cap: u64,
) -> Result<SolveResult> {
    let ues = channel.ues();
    let count = count_schedules(ues, slots, bounds, cap)?;
    if count > cap {
        return Err(Error::EnumerationCap { count, cap });
    }
    if count == 0 {
        return Err(Error::Infeasible { bounds: bounds.to_string(), ues, slots });
    }
    let mut memo = SlotMemo::new(ues);
    let mut best: Option<(f64, Vec<u64>)> = None;
    let mut failure = None;
    let mut score = |mask: u64| {
        if let Some(c) = memo.get(mask) {
            return Some(c);
        }
        match objective.slot_cost(&channel.hhat, &channel.gamma, &mask_to_column(mask, ues)) {
            Ok(c) => {
                memo.insert(mask, c);
                Some(c)
            }
            Err(e) => {
                failure = Some(e);
                None
            }
        }
    };
    Enumerator::new(ues, slots, bounds).walk(0.0, &mut score, &mut |columns, cost| {
        let better = match &best {
            None => true,
            Some((b, cols)) => cost < *b || (cost == *b && row_major_cmp(columns, cols, ues) == Ordering::Less),
        };
        if better {
            best = Some((cost, columns.to_vec()));
        }
        true
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (cost, columns) = best.expect("count > 0 guarantees a candidate");
    let entries = DMatrix::from_fn(ues, slots, |u, t| (columns[t] >> u & 1) as f64);
    let binary = SchedulingMatrix::binary(entries)?;
    Ok(SolveResult {
        relaxed: binary.clone(),
        binary,
        cost,
        restart: 0,
        iterations: count as usize,
        restart_costs: vec![Some(cost)],
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic() {
        let mut pick = vec![0, 1];
        let mut all = vec![pick.clone()];
        while next_combination(&mut pick, 4) {
            all.push(pick.clone());
        }
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut empty: Vec<usize> = vec![];
        assert!(!next_combination(&mut empty, 3));
    }

    #[test]
    fn counts_match_closed_forms() {
        // one slot each: choose which 3 of 6 go first
        let b = ConstraintBox::new(3, 3, 1, 1).unwrap();
        assert_eq!(count_schedules(6, 2, &b, u64::MAX).unwrap(), 20);
        // unconstrained: every binary matrix
        assert_eq!(count_schedules(3, 2, &ConstraintBox::unconstrained(3, 2), u64::MAX).unwrap(), 64);
        // 16 UEs, 8..10 per slot, every UE in at least one of two slots
        let s1 = ConstraintBox::new(8, 10, 1, 2).unwrap();
        let expected: u64 = (8..=10u64)
            .flat_map(|a| (8..=10u64).map(move |b| (a, b)))
            .map(|(a, b)| {
                // the second slot must hold all 16 - a UEs missing from the
                // first one plus b - (16 - a) of the a already scheduled
                let overlap = b + a;
                if overlap < 16 { 0 } else { binomial(16, a) * binomial(a, overlap - 16) }
            })
            .sum();
        assert_eq!(count_schedules(16, 2, &s1, u64::MAX).unwrap(), expected);
        assert_eq!(expected, 4_954_950);
    }

    #[test]
    fn count_stops_past_cap() {
        let b = ConstraintBox::new(16, 16, 1, 1).unwrap();
        let n = count_schedules(32, 2, &b, 1000).unwrap();
        assert!(n > 1000 && n < 2000, "{n}");
    }

    #[test]
    fn row_major_order() {
        // [[0,1],[1,0]] < [[1,0],[0,1]]
        assert_eq!(row_major_cmp(&[0b10, 0b01], &[0b01, 0b10], 2), Ordering::Less);
        assert_eq!(row_major_cmp(&[0b01], &[0b01], 2), Ordering::Equal);
    }

    #[test]
    fn random_partition_and_boxes() {
        let c = random_schedule(6, 3, 1).unwrap();
        assert!(c.row_sums().iter().all(|&s| s == 1.0));
        assert!(c.column_sums().iter().all(|&s| s == 2.0));
        assert_eq!(random_schedule(6, 3, 1).unwrap(), c);
        assert!(random_schedule(5, 2, 1).is_err());
        assert!(crate::model::is_feasible(&c, &random_box(6, 3).unwrap()));
        let a = aua_schedule(3, 2);
        assert_eq!(a.row_sums(), vec![2.0; 3]);
        assert_eq!(a.column_sums(), vec![3.0; 2]);
        assert!(crate::model::is_feasible(&a, &aua_box(3, 2)));
    }
}
