//! Forward-backward splitting on the relaxed scheduling problem, quantization
//! back to a feasible binary schedule, and multi-restart selection.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::model::{feasibility_precheck, is_feasible, ConstraintBox, SchedulingMatrix};
use crate::objectives::Objective;
use crate::projection::{project_intersection, DrsConfig};
use crate::rng::{derive_seed, Purpose};

/// How the gradient step size evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    /// Barzilai-Borwein spectral steps with nonmonotone backtracking.
    Adaptive,
    /// `tau_init` at every iteration, no backtracking.
    Fixed,
}

/// Forward-backward splitting parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FbsConfig {
    pub tau_init: f64,
    /// Gradient-step iterations; zero returns the projected initialization.
    pub max_iter: usize,
    /// Independent random initializations.
    pub restarts: usize,
    /// Stop when successive iterates differ by less than this (Frobenius).
    pub tol: f64,
    pub step_rule: StepRule,
    /// Backtracking compares against the largest cost of this many recent iterates.
    pub window: usize,
    pub shrink: f64,
    pub tau_min: f64,
    pub drs: DrsConfig,
}

impl Default for FbsConfig {
    fn default() -> Self {
        Self {
            tau_init: 0.01,
            max_iter: 100,
            restarts: 1,
            tol: 1e-6,
            step_rule: StepRule::Adaptive,
            window: 10,
            shrink: 0.5,
            tau_min: 1e-8,
            drs: DrsConfig::default(),
        }
    }
}

impl FbsConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(self.tau_init > 0.0 && self.tau_init.is_finite()) {
            problems.push(format!("tau_init must be positive, got {}", self.tau_init));
        }
        if self.restarts == 0 {
            problems.push("restarts must be at least 1".to_string());
        }
        if !(self.tol > 0.0) {
            problems.push(format!("tol must be positive, got {}", self.tol));
        }
        if self.window == 0 {
            problems.push("window must be at least 1".to_string());
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            problems.push(format!("shrink must lie in (0,1), got {}", self.shrink));
        }
        if !(self.tau_min > 0.0) {
            problems.push(format!("tau_min must be positive, got {}", self.tau_min));
        }
        if let Err(e) = self.drs.validate() {
            problems.push(e.to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

/// Relaxed FBS iterate and how it was reached.
#[derive(Debug, Clone)]
pub struct FbsOutcome {
    pub relaxed: SchedulingMatrix,
    pub iterations: usize,
    /// `F + R` at each accepted iterate, starting with the projected initialization.
    pub history: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Best binary schedule over all restarts.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub binary: SchedulingMatrix,
    /// The relaxed iterate the winning schedule was quantized from.
    pub relaxed: SchedulingMatrix,
    /// `F` of the binary schedule.
    pub cost: f64,
    pub restart: usize,
    pub iterations: usize,
    /// Binary cost of each restart, `None` where the restart failed.
    pub restart_costs: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

fn check_box(ues: usize, slots: usize, bounds: &ConstraintBox) -> Result<()> {
    if !feasibility_precheck(ues, slots, bounds) || bounds.ue_max > ues || bounds.slot_max > slots {
        return Err(Error::Infeasible { bounds: bounds.to_string(), ues, slots });
    }
    Ok(())
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

fn project(z: &DMatrix<f64>, bounds: &ConstraintBox, cfg: &FbsConfig, warnings: &mut Vec<String>) -> Result<DMatrix<f64>> {
    let out = project_intersection(z, bounds, &cfg.drs)?;
    if !out.converged && warnings.iter().all(|w| !w.starts_with("DRS")) {
        warnings.push(format!("DRS stopped at the iteration cap of {}", cfg.drs.max_iter));
    }
    Ok(out.v)
}

fn finite_gradient(g: DMatrix<f64>) -> Result<DMatrix<f64>> {
    if g.iter().all(|x| x.is_finite()) {
        Ok(g)
    } else {
        Err(Error::NonFinite("objective gradient".into()))
    }
}

/// Runs forward-backward splitting from a uniform random initialization.
pub fn fbs_solve(
    objective: &dyn Objective,
    channel: &ChannelSet,
    bounds: &ConstraintBox,
    slots: usize,
    cfg: &FbsConfig,
    seed: u64,
) -> Result<FbsOutcome> {
    cfg.validate()?;
    let ues = channel.ues();
    check_box(ues, slots, bounds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = DMatrix::from_fn(ues, slots, |_, _| rng.random::<f64>());
    let mut warnings = Vec::new();
    let mut c = project(&init, bounds, cfg, &mut warnings)?;
    let f = |m: &DMatrix<f64>| objective.regularized_cost(m, channel);
    let mut cost = f(&c)?;
    let mut history = vec![cost];
    let mut grad = if cfg.max_iter > 0 {
        finite_gradient(objective.regularized_gradient(&c, channel)?)?
    } else {
        DMatrix::zeros(ues, slots)
    };
    let mut tau = cfg.tau_init;
    let mut iterations = 0;
    for _ in 0..cfg.max_iter {
        iterations += 1;
        let reference = history.iter().rev().take(cfg.window).copied().fold(f64::NEG_INFINITY, f64::max);
        let (next, next_cost) = loop {
            let candidate = project(&(&c - &grad * tau), bounds, cfg, &mut warnings)?;
            let candidate_cost = f(&candidate)?;
            if cfg.step_rule == StepRule::Fixed {
                break (candidate, candidate_cost);
            }
            let step = &candidate - &c;
            let bound = reference + inner(&step, &grad) + step.norm_squared() / (2.0 * tau);
            if candidate_cost <= bound + 1e-12 * reference.abs().max(1.0) || tau * cfg.shrink < cfg.tau_min {
                break (candidate, candidate_cost);
            }
            tau *= cfg.shrink;
        };
        let dx = &next - &c;
        let change = dx.norm();
        let next_grad = finite_gradient(objective.regularized_gradient(&next, channel)?)?;
        if cfg.step_rule == StepRule::Adaptive {
            let dg = &next_grad - &grad;
            let (xx, xg, gg) = (inner(&dx, &dx), inner(&dx, &dg), inner(&dg, &dg));
            let steepest = xx / xg;
            let minimal = xg / gg;
            let proposal = if 2.0 * minimal > steepest { minimal } else { steepest - minimal / 2.0 };
            tau = if proposal.is_finite() && proposal > 0.0 { proposal } else { tau * 1.5 };
            tau = tau.max(cfg.tau_min);
        }
        c = next;
        cost = next_cost;
        grad = next_grad;
        history.push(cost);
        if change < cfg.tol {
            break;
        }
    }
    Ok(FbsOutcome {
        relaxed: SchedulingMatrix::relaxed(c)?,
        iterations,
        history,
        warnings,
    })
}

/// Indices of the `k` largest `values` among `candidates`, ties to the lower index.
fn top_k(values: &[f64], candidates: &[usize], k: usize) -> Vec<usize> {
    let mut sorted = candidates.to_vec();
    sorted.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    sorted.truncate(k);
    sorted
}

struct Counts {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Counts {
    fn of(x: &[Vec<bool>], slots: usize) -> Self {
        let rows = x.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
        let cols = (0..slots).map(|t| x.iter().filter(|r| r[t]).count()).collect();
        Self { rows, cols }
    }
}

/// Adds one slot to UE `ue` along an alternating path that leaves every other
/// row and column count within bounds. Returns false when no path exists.
fn augment_row(x: &mut [Vec<bool>], ue: usize, bounds: &ConstraintBox, value: &DMatrix<f64>) -> bool {
    let (ues, slots) = (x.len(), x[0].len());
    let counts = Counts::of(x, slots);
    // BFS over UEs; parent links store (previous UE, slot used to reach it)
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; ues];
    let mut seen_slot = vec![false; slots];
    let mut seen_ue = vec![false; ues];
    seen_ue[ue] = true;
    let mut queue = std::collections::VecDeque::from([ue]);
    while let Some(a) = queue.pop_front() {
        let mut free: Vec<usize> = (0..slots).filter(|&t| !x[a][t] && !seen_slot[t]).collect();
        free.sort_by(|&s, &t| value[(a, t)].total_cmp(&value[(a, s)]).then(s.cmp(&t)));
        for t in free {
            seen_slot[t] = true;
            if counts.cols[t] < bounds.ue_max {
                apply_row_path(x, &parent, a, t);
                return true;
            }
            let mut holders: Vec<usize> = (0..ues).filter(|&b| x[b][t] && !seen_ue[b]).collect();
            holders.sort_by(|&p, &q| value[(p, t)].total_cmp(&value[(q, t)]).then(p.cmp(&q)));
            for b in holders {
                seen_ue[b] = true;
                parent[b] = Some((a, t));
                if counts.rows[b] > bounds.slot_min {
                    // b gives up slot t to the chain
                    x[b][t] = false;
                    apply_row_path(x, &parent, a, t);
                    return true;
                }
                queue.push_back(b);
            }
        }
    }
    false
}

/// Walks back from UE `a`, which takes slot `t`, handing each slot over.
fn apply_row_path(x: &mut [Vec<bool>], parent: &[Option<(usize, usize)>], mut a: usize, mut t: usize) {
    loop {
        x[a][t] = true;
        match parent[a] {
            Some((prev, slot)) => {
                x[a][slot] = false;
                a = prev;
                t = slot;
            }
            None => break,
        }
    }
}

fn transpose(x: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let slots = x[0].len();
    (0..slots).map(|t| x.iter().map(|r| r[t]).collect()).collect()
}

/// Makes every row and column meet its lower bound without breaking upper bounds.
fn repair(x: &mut Vec<Vec<bool>>, bounds: &ConstraintBox, value: &DMatrix<f64>) -> Result<bool> {
    let (ues, slots) = (x.len(), x[0].len());
    let mut changed = false;
    let flipped = ConstraintBox {
        ue_min: bounds.slot_min,
        ue_max: bounds.slot_max,
        slot_min: bounds.ue_min,
        slot_max: bounds.ue_max,
    };
    let vt = value.transpose();
    let fail = || Error::Infeasible { bounds: bounds.to_string(), ues, slots };
    for t in 0..slots {
        while Counts::of(x, slots).cols[t] < bounds.ue_min {
            let mut xt = transpose(x);
            if !augment_row(&mut xt, t, &flipped, &vt) {
                return Err(fail());
            }
            *x = transpose(&xt);
            changed = true;
        }
    }
    for u in 0..ues {
        while Counts::of(x, slots).rows[u] < bounds.slot_min {
            if !augment_row(x, u, bounds, value) {
                return Err(fail());
            }
            changed = true;
        }
    }
    Ok(changed)
}

fn to_matrix(x: &[Vec<bool>]) -> DMatrix<f64> {
    DMatrix::from_fn(x.len(), x[0].len(), |u, t| if x[u][t] { 1.0 } else { 0.0 })
}

fn slot_values(x: &[Vec<bool>], t: usize) -> Vec<f64> {
    x.iter().map(|r| if r[t] { 1.0 } else { 0.0 }).collect()
}

/// Binary schedule and any repairs made while producing it.
#[derive(Debug, Clone)]
pub struct Quantized {
    pub binary: SchedulingMatrix,
    pub warnings: Vec<String>,
}

/// Rounds a relaxed schedule to a feasible binary one.
///
/// The lower phase fills each slot with the `ue_min` largest entries among
/// UEs below `slot_min`; the upper phase then adds up to `ue_max - ue_min`
/// further UEs per slot, each only if it lowers the slot cost.
pub fn quantize(
    relaxed: &SchedulingMatrix,
    objective: &dyn Objective,
    channel: &ChannelSet,
    bounds: &ConstraintBox,
) -> Result<Quantized> {
    let (ues, slots) = (relaxed.ues(), relaxed.slots());
    check_box(ues, slots, bounds)?;
    if ues != channel.ues() {
        return Err(Error::Dimension(format!("schedule has {ues} UEs, channel has {}", channel.ues())));
    }
    let c = relaxed.entries();
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("relaxed schedule".into()));
    }
    if relaxed.has_binary_values() {
        let as_binary = SchedulingMatrix::binary(c.clone())?;
        if is_feasible(&as_binary, bounds) {
            return Ok(Quantized { binary: as_binary, warnings: Vec::new() });
        }
    }
    let mut warnings = Vec::new();
    let mut x = vec![vec![false; slots]; ues];
    let mut rows = vec![0usize; ues];

    for t in 0..slots {
        let column: Vec<f64> = c.column(t).iter().copied().collect();
        let eligible: Vec<usize> = (0..ues).filter(|&u| rows[u] < bounds.slot_min).collect();
        let mut chosen = top_k(&column, &eligible, bounds.ue_min);
        if chosen.len() < bounds.ue_min {
            let spare: Vec<usize> =
                (0..ues).filter(|&u| rows[u] >= bounds.slot_min && rows[u] < bounds.slot_max).collect();
            chosen.extend(top_k(&column, &spare, bounds.ue_min - chosen.len()));
        }
        for u in chosen {
            x[u][t] = true;
            rows[u] += 1;
        }
    }
    if repair(&mut x, bounds, c)? {
        warnings.push("lower phase left bounds unmet; repaired along alternating paths".to_string());
    }

    let gap = bounds.ue_max - bounds.ue_min;
    let mut rows = Counts::of(&x, slots).rows;
    for t in 0..slots {
        let column: Vec<f64> = c.column(t).iter().copied().collect();
        let active = x.iter().filter(|r| r[t]).count();
        let room = gap.min(bounds.ue_max.saturating_sub(active));
        let open: Vec<usize> = (0..ues).filter(|&u| !x[u][t] && rows[u] < bounds.slot_max).collect();
        let candidates = top_k(&column, &open, room);
        if candidates.is_empty() {
            continue;
        }
        let mut current = objective.slot_cost(&channel.hhat, &channel.gamma, &slot_values(&x, t))?;
        for u in candidates {
            x[u][t] = true;
            let trial = objective.slot_cost(&channel.hhat, &channel.gamma, &slot_values(&x, t))?;
            if trial < current - 1e-12 {
                current = trial;
                rows[u] += 1;
            } else {
                x[u][t] = false;
            }
        }
    }
    let binary = SchedulingMatrix::binary(to_matrix(&x))?;
    debug_assert!(is_feasible(&binary, bounds));
    Ok(Quantized { binary, warnings })
}

/// Runs `cfg.restarts` independent FBS + quantization pipelines and keeps the
/// binary schedule of lowest `F` (ties to the lowest restart index).
pub fn schedule(
    objective: &dyn Objective,
    channel: &ChannelSet,
    bounds: &ConstraintBox,
    slots: usize,
    cfg: &FbsConfig,
    seed: u64,
) -> Result<SolveResult> {
    cfg.validate()?;
    check_box(channel.ues(), slots, bounds)?;
    let attempts: Vec<Result<(FbsOutcome, Quantized, f64)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let restart_seed = derive_seed(seed, Purpose::Solver, &[k as u64]);
            let fbs = fbs_solve(objective, channel, bounds, slots, cfg, restart_seed)?;
            let q = quantize(&fbs.relaxed, objective, channel, bounds)?;
            let cost = objective.cost(q.binary.entries(), channel)?;
            Ok((fbs, q, cost))
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    let mut failures = Vec::new();
    let mut restart_costs = Vec::with_capacity(attempts.len());
    for (k, attempt) in attempts.iter().enumerate() {
        match attempt {
            Ok((_, _, cost)) => {
                restart_costs.push(Some(*cost));
                if best.is_none_or(|(_, b)| *cost < b) {
                    best = Some((k, *cost));
                }
            }
            Err(e) => {
                restart_costs.push(None);
                failures.push(format!("restart {k}: {e}"));
            }
        }
    }
    let Some((k, cost)) = best else {
        return Err(Error::AllRestartsFailed(failures));
    };
    let (fbs, q, _) = attempts.into_iter().nth(k).and_then(|a| a.ok()).ok_or_else(|| Error::AllRestartsFailed(vec![]))?;
    let mut warnings = fbs.warnings;
    warnings.extend(q.warnings);
    warnings.extend(failures);
    Ok(SolveResult {
        binary: q.binary,
        relaxed: fbs.relaxed,
        cost,
        restart: k,
        iterations: fbs.iterations,
        restart_costs,
        warnings,
    })
}
