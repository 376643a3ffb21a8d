//! Orthogonal projections onto the scheduling constraint set.
//!
//! [`project_simplex`] projects a vector onto `{p ∈ [0,1]^M : l_min ≤ Σp ≤ l_max}`
//! by locating the shift `λ*` in `p = clamp(q + λ*, 0, 1)` from the sorted
//! breakpoints of the piecewise-linear sum `s(λ)`. [`project_intersection`]
//! combines column and row projections with Douglas-Rachford splitting to
//! project a matrix onto the intersection of the UE-count and slot-count
//! constraint sets.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{feasibility_precheck, ConstraintBox};

/// `{p ∈ [0,1]^M : lower ≤ Σp ≤ upper}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexSpec {
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
}

impl SimplexSpec {
    pub fn new(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        let spec = Self { dim, lower, upper };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.dim as f64;
        if !(0.0 <= self.lower && self.lower <= self.upper && self.upper <= m) {
            return Err(Error::InvalidBox(format!(
                "simplex bounds must satisfy 0 <= {} <= {} <= {}",
                self.lower, self.upper, self.dim
            )));
        }
        Ok(())
    }
}

/// Multipliers proving optimality of a simplex projection.
///
/// Stationarity reads `p - q - μ + υ - γ + Γ = 0`, so `λ* = γ - Γ` on the
/// entries strictly inside `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KktCertificate {
    pub lambda: f64,
    /// Multipliers of `p_i ≥ 0`.
    pub mu: Vec<f64>,
    /// Multipliers of `p_i ≤ 1`.
    pub upsilon: Vec<f64>,
    /// Multiplier of `Σp ≥ lower`.
    pub gamma: f64,
    /// Multiplier of `Σp ≤ upper`.
    pub gamma_upper: f64,
    /// Entries equal to 1.
    pub ones: usize,
    /// Entries equal to 0.
    pub zeros: usize,
}

impl KktCertificate {
    /// Largest violation among stationarity, complementary slackness, primal
    /// and dual feasibility.
    pub fn residual(&self, q: &[f64], p: &[f64], spec: &SimplexSpec) -> f64 {
        let sum: f64 = p.iter().sum();
        let mut worst: f64 = 0.0;
        for i in 0..q.len() {
            let stationarity = p[i] - q[i] - self.mu[i] + self.upsilon[i] - self.gamma + self.gamma_upper;
            worst = worst
                .max(stationarity.abs())
                .max((self.mu[i] * p[i]).abs())
                .max((self.upsilon[i] * (p[i] - 1.0)).abs())
                .max(-p[i])
                .max(p[i] - 1.0)
                .max(-self.mu[i])
                .max(-self.upsilon[i]);
        }
        let worst = worst
            .max((self.gamma * (spec.lower - sum)).abs())
            .max((self.gamma_upper * (sum - spec.upper)).abs())
            .max(spec.lower - sum)
            .max(sum - spec.upper)
            .max(-self.gamma)
            .max(-self.gamma_upper);
        // negated zero multipliers would otherwise surface as -0
        if worst > 0.0 { worst } else { 0.0 }
    }
}

fn shifted(q: &[f64], lambda: f64) -> Vec<f64> {
    q.iter().map(|&x| (x + lambda).clamp(0.0, 1.0)).collect()
}

/// Breakpoints of `s(λ) = Σ clamp(q_i + λ, 0, 1)` in ascending order.
///
/// With `q` sorted descending, `-q` and `1 - q` are each ascending, so the
/// breakpoint vector is a merge of the two.
fn breakpoints(sorted_desc: &[f64]) -> Vec<f64> {
    let lo: Vec<f64> = sorted_desc.iter().map(|x| -x).collect();
    let hi: Vec<f64> = sorted_desc.iter().map(|x| 1.0 - x).collect();
    let mut out = Vec::with_capacity(2 * lo.len());
    let (mut a, mut b) = (0, 0);
    while a < lo.len() || b < hi.len() {
        if b == hi.len() || (a < lo.len() && lo[a] <= hi[b]) {
            out.push(lo[a]);
            a += 1;
        } else {
            out.push(hi[b]);
            b += 1;
        }
    }
    out
}

/// Smallest `λ` with `s(λ) = level`, for `0 < level ≤ M`.
///
/// Sweeps the intervals `[χ_k, χ_{k+1})` keeping the number of entries at one
/// (`M1`) and the interior sum; inside the interval where the level is
/// reached, `λ = (level - M1 - Σ_interior q) / (M - M0 - M1)`.
fn level_shift(sorted_desc: &[f64], chi: &[f64], level: f64) -> f64 {
    let m = sorted_desc.len();
    // entries enter the interior in descending-q order at χ = -q and leave
    // (saturating at 1) in the same order at χ = 1 - q
    let (mut entered, mut saturated) = (0usize, 0usize);
    let mut interior_sum = 0.0;
    for k in 0..chi.len() {
        let at = chi[k];
        while entered < m && -sorted_desc[entered] <= at {
            interior_sum += sorted_desc[entered];
            entered += 1;
        }
        while saturated < entered && 1.0 - sorted_desc[saturated] <= at {
            interior_sum -= sorted_desc[saturated];
            saturated += 1;
        }
        let interior = entered - saturated;
        let s_at = saturated as f64 + interior_sum + interior as f64 * at;
        if s_at >= level {
            return at;
        }
        let next = chi.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if interior > 0 {
            let lambda = (level - saturated as f64 - interior_sum) / interior as f64;
            if lambda < next {
                return lambda.max(at);
            }
        }
    }
    chi[chi.len() - 1]
}

/// Projects `q` onto `{p ∈ [0,1]^M : lower ≤ Σp ≤ upper}`.
pub fn project_simplex(q: &[f64], spec: &SimplexSpec) -> Result<(Vec<f64>, KktCertificate)> {
    spec.validate()?;
    if q.len() != spec.dim {
        return Err(Error::Dimension(format!("vector of length {} for simplex of dimension {}", q.len(), spec.dim)));
    }
    if q.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("projection input".into()));
    }
    let m = q.len();
    let lambda = if m == 0 {
        0.0
    } else {
        let mut sorted: Vec<f64> = q.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let chi = breakpoints(&sorted);
        let s0: f64 = shifted(q, 0.0).iter().sum();
        // candidates: interior (λ = 0), lower bound active, upper bound active
        let mut candidates = Vec::with_capacity(3);
        if spec.lower <= s0 && s0 <= spec.upper {
            candidates.push(0.0);
        }
        if s0 < spec.lower {
            candidates.push(level_shift(&sorted, &chi, spec.lower));
        }
        if s0 > spec.upper {
            // largest λ with s(λ) = upper, via the mirrored problem 1 - q
            let mirrored: Vec<f64> = sorted.iter().rev().map(|x| 1.0 - x).collect();
            let mchi = breakpoints(&mirrored);
            let level = m as f64 - spec.upper;
            let shift = if level <= 0.0 { mchi[0] } else { level_shift(&mirrored, &mchi, level) };
            candidates.push(-shift);
        }
        let distance = |lam: f64| -> f64 { q.iter().map(|&x| ((x + lam).clamp(0.0, 1.0) - x).powi(2)).sum() };
        let mut best = candidates[0];
        for &c in &candidates[1..] {
            if distance(c) < distance(best) {
                best = c;
            }
        }
        best
    };
    let p = shifted(q, lambda);
    let mu: Vec<f64> = q.iter().zip(&p).map(|(&qi, &pi)| if pi == 0.0 { (-qi - lambda).max(0.0) } else { 0.0 }).collect();
    let upsilon: Vec<f64> =
        q.iter().zip(&p).map(|(&qi, &pi)| if pi == 1.0 { (qi + lambda - 1.0).max(0.0) } else { 0.0 }).collect();
    let cert = KktCertificate {
        lambda,
        mu,
        upsilon,
        gamma: lambda.max(0.0),
        gamma_upper: (-lambda).max(0.0),
        ones: p.iter().filter(|&&x| x == 1.0).count(),
        zeros: p.iter().filter(|&&x| x == 0.0).count(),
    };
    Ok((p, cert))
}

/// Douglas-Rachford parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DrsConfig {
    pub beta: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for DrsConfig {
    fn default() -> Self {
        Self { beta: 1.0, max_iter: 2000, tol: 1e-8 }
    }
}

impl DrsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) || self.max_iter == 0 || !(self.tol > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "DRS needs beta >= 0, max_iter >= 1 and tol > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Result of [`project_intersection`].
#[derive(Debug, Clone)]
pub struct DrsOutcome {
    pub v: DMatrix<f64>,
    pub iterations: usize,
    /// False when the iteration cap was hit first.
    pub converged: bool,
}

fn project_columns(x: &DMatrix<f64>, spec: &SimplexSpec) -> Result<DMatrix<f64>> {
    let mut out = x.clone();
    for t in 0..x.ncols() {
        let col: Vec<f64> = x.column(t).iter().copied().collect();
        let (p, _) = project_simplex(&col, spec)?;
        for (u, v) in p.into_iter().enumerate() {
            out[(u, t)] = v;
        }
    }
    Ok(out)
}

fn project_rows(x: &DMatrix<f64>, spec: &SimplexSpec) -> Result<DMatrix<f64>> {
    let mut out = x.clone();
    for u in 0..x.nrows() {
        let row: Vec<f64> = x.row(u).iter().copied().collect();
        let (p, _) = project_simplex(&row, spec)?;
        for (t, v) in p.into_iter().enumerate() {
            out[(u, t)] = v;
        }
    }
    Ok(out)
}

/// Projects `z` onto the matrices in `[0,1]^{U x T}` whose column sums lie in
/// `[ue_min, ue_max]` and row sums in `[slot_min, slot_max]`.
pub fn project_intersection(z: &DMatrix<f64>, bounds: &ConstraintBox, cfg: &DrsConfig) -> Result<DrsOutcome> {
    cfg.validate()?;
    let (ues, slots) = z.shape();
    if !feasibility_precheck(ues, slots, bounds) {
        return Err(Error::Infeasible { bounds: bounds.to_string(), ues, slots });
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("projection input".into()));
    }
    let col_spec = SimplexSpec::new(ues, bounds.ue_min as f64, bounds.ue_max as f64)?;
    let row_spec = SimplexSpec::new(slots, bounds.slot_min as f64, bounds.slot_max as f64)?;
    let beta = cfg.beta;
    let scale = 1.0 / (beta + 1.0);
    let bz = z * beta;
    let mut g = DMatrix::zeros(ues, slots);
    let mut v = DMatrix::zeros(ues, slots);
    for k in 1..=cfg.max_iter {
        let v_next = project_columns(&((&bz + &g) * scale), &col_spec)?;
        let reflected = (&bz + &v_next * 2.0 - &g) * scale;
        g = project_rows(&reflected, &row_spec)? + &g - &v_next;
        let change = (&v_next - &v).norm();
        v = v_next;
        if k > 1 && change < cfg.tol {
            return Ok(DrsOutcome { v, iterations: k, converged: true });
        }
    }
    Ok(DrsOutcome { v, iterations: cfg.max_iter, converged: false })
}
