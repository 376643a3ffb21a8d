//! Scheduling objectives, their gradients, and the binarization regularizer.
//!
//! Every objective is a sum over slots of a function of one column `c_t` of
//! the scheduling matrix. Per slot, everything is expressed through
//!
//! * `L1 = (Ĥ D² Ĥᴴ + N0 I)⁻¹` with `D = diag(c_t)`,
//! * `K  = Ĥᴴ L1 Ĥ`  (so `K[i][j] = ĥᵢᴴ L1 ĥⱼ`),
//! * `K2 = Ĥᴴ L1² Ĥ`,
//!
//! obtained from one Cholesky factorization of `L1⁻¹`. Exponents on `D` are
//! kept exact so the gradients are valid for relaxed (non-binary) `c_t`.

use std::f64::consts::{LN_2, LOG2_E};
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// The three supported scheduling objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// Post-LMMSE equalization mean squared error.
    MseLmmse,
    /// Negative channel capacity.
    Capacity,
    /// Negative post-LMMSE sum of achievable rates.
    SumRate,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 3] = [ObjectiveKind::MseLmmse, ObjectiveKind::Capacity, ObjectiveKind::SumRate];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::MseLmmse => "mse-lmmse",
            ObjectiveKind::Capacity => "capacity",
            ObjectiveKind::SumRate => "sum-rate",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ObjectiveKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown objective {s:?}")))
    }
}

/// A differentiable, slot-separable scheduling objective `F(C) = Σ_t f(c_t)`
/// together with the weight of the binarization regularizer.
pub trait Objective: Send + Sync {
    /// `f(c_t)` for one slot.
    fn slot_cost(&self, hhat: &CMatrix, gamma: &[f64], c_t: &[f64]) -> Result<f64>;

    /// `∂f/∂c_t` for one slot.
    fn slot_gradient(&self, hhat: &CMatrix, gamma: &[f64], c_t: &[f64]) -> Result<Vec<f64>>;

    /// Regularizer weight.
    fn alpha(&self) -> f64;

    fn cost(&self, c: &DMatrix<f64>, channel: &ChannelSet) -> Result<f64> {
        let mut total = 0.0;
        for t in 0..c.ncols() {
            total += self.slot_cost(&channel.hhat, &channel.gamma, &column(c, t))?;
        }
        Ok(total)
    }

    fn gradient(&self, c: &DMatrix<f64>, channel: &ChannelSet) -> Result<DMatrix<f64>> {
        let mut g = DMatrix::zeros(c.nrows(), c.ncols());
        for t in 0..c.ncols() {
            let gt = self.slot_gradient(&channel.hhat, &channel.gamma, &column(c, t))?;
            g.set_column(t, &nalgebra::DVector::from_vec(gt));
        }
        Ok(g)
    }

    /// `F(C) + R(C)`.
    fn regularized_cost(&self, c: &DMatrix<f64>, channel: &ChannelSet) -> Result<f64> {
        Ok(self.cost(c, channel)? + regularizer(c, self.alpha()))
    }

    /// `∇F(C) + ∇R(C)`.
    fn regularized_gradient(&self, c: &DMatrix<f64>, channel: &ChannelSet) -> Result<DMatrix<f64>> {
        Ok(self.gradient(c, channel)? + grad_regularizer(c, self.alpha()))
    }
}

/// Which objective to optimize, the regularizer weight and the noise power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    pub alpha: f64,
    pub n0: f64,
}

impl ObjectiveSpec {
    pub fn new(kind: ObjectiveKind, alpha: f64, n0: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidScenario(format!("alpha {alpha} must be non-negative")));
        }
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::InvalidScenario(format!("noise power {n0} must be positive")));
        }
        Ok(Self { kind, alpha, n0 })
    }
}

impl Objective for ObjectiveSpec {
    fn slot_cost(&self, hhat: &CMatrix, gamma: &[f64], c_t: &[f64]) -> Result<f64> {
        let sys = SlotSystem::new(hhat, c_t, self.n0)?;
        Ok(match self.kind {
            ObjectiveKind::MseLmmse => sys.mse(c_t, self.n0),
            ObjectiveKind::Capacity => sys.neg_capacity(self.n0),
            ObjectiveKind::SumRate => sys.neg_sum_rate(c_t, gamma, self.n0),
        })
    }

    fn slot_gradient(&self, hhat: &CMatrix, gamma: &[f64], c_t: &[f64]) -> Result<Vec<f64>> {
        let sys = SlotSystem::new(hhat, c_t, self.n0)?;
        Ok(match self.kind {
            ObjectiveKind::MseLmmse => sys.mse_gradient(c_t),
            ObjectiveKind::Capacity => sys.capacity_gradient(c_t),
            ObjectiveKind::SumRate => sys.sum_rate_gradient(c_t, gamma, self.n0),
        })
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn column(c: &DMatrix<f64>, t: usize) -> Vec<f64> {
    c.column(t).iter().copied().collect()
}

/// LMMSE equalizer of one slot and the inverse covariance it is built from.
#[derive(Debug, Clone)]
pub struct Equalizer {
    /// `B x U`, column `u` filters UE `u`.
    pub w: CMatrix,
    /// `(Ĥ D² Ĥᴴ + N0 I_B)⁻¹`.
    pub l1: CMatrix,
}

fn check_finite(hhat: &CMatrix) -> Result<()> {
    if hhat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("channel estimate".into()));
    }
    Ok(())
}

/// `W = (Ĥ D² Ĥᴴ + N0 I_B)⁻¹ Ĥ D` through the `B x B` system.
pub fn lmmse_weights_bxb(hhat: &CMatrix, c_t: &[f64], n0: f64) -> Result<CMatrix> {
    check_finite(hhat)?;
    let chol = linalg::cholesky(linalg::masked_covariance(hhat, c_t, n0))?;
    Ok(chol.solve(&linalg::scale_columns(hhat, c_t)))
}

/// The same equalizer through the `U x U` system `Ĥ D (D Ĥᴴ Ĥ D + N0 I_U)⁻¹`.
pub fn lmmse_weights_uxu(hhat: &CMatrix, c_t: &[f64], n0: f64) -> Result<CMatrix> {
    check_finite(hhat)?;
    let g = linalg::scale_columns(hhat, c_t);
    let mut m = g.adjoint() * &g;
    for i in 0..m.nrows() {
        m[(i, i)] += Complex64::new(n0, 0.0);
    }
    let chol = linalg::cholesky(m)?;
    Ok(chol.solve(&g.adjoint()).adjoint())
}

/// LMMSE weights using whichever system is smaller.
pub fn lmmse_weights(hhat: &CMatrix, c_t: &[f64], n0: f64) -> Result<CMatrix> {
    if hhat.ncols() < hhat.nrows() {
        lmmse_weights_uxu(hhat, c_t, n0)
    } else {
        lmmse_weights_bxb(hhat, c_t, n0)
    }
}

/// LMMSE equalizer `W` and `L1` for one slot.
pub fn lmmse_equalizer(hhat: &CMatrix, c_t: &[f64], n0: f64) -> Result<Equalizer> {
    check_finite(hhat)?;
    let chol = linalg::cholesky(linalg::masked_covariance(hhat, c_t, n0))?;
    let l1 = chol.inverse();
    let w = lmmse_weights(hhat, c_t, n0)?;
    Ok(Equalizer { w, l1 })
}

/// Per-slot quantities shared by all objectives.
struct SlotSystem {
    k: CMatrix,
    k2: CMatrix,
    ln_det: f64,
    antennas: usize,
}

impl SlotSystem {
    fn new(hhat: &CMatrix, c_t: &[f64], n0: f64) -> Result<Self> {
        check_finite(hhat)?;
        if hhat.ncols() != c_t.len() {
            return Err(Error::Dimension(format!(
                "channel has {} UEs, slot column has {}",
                hhat.ncols(),
                c_t.len()
            )));
        }
        let chol = linalg::cholesky(linalg::masked_covariance(hhat, c_t, n0))?;
        let x = chol.solve(hhat); // L1 Ĥ
        let k = hhat.adjoint() * &x;
        let k2 = x.adjoint() * &x;
        Ok(Self {
            k,
            k2,
            ln_det: linalg::ln_det(&chol),
            antennas: hhat.nrows(),
        })
    }

    fn kd(&self, i: usize) -> f64 {
        self.k[(i, i)].re
    }

    fn k2d(&self, i: usize) -> f64 {
        self.k2[(i, i)].re
    }

    fn mse(&self, c: &[f64], n0: f64) -> f64 {
        let u = c.len();
        let mut total = 0.0;
        for i in 0..u {
            for j in 0..u {
                let diag = if i == j { c[i] } else { 0.0 };
                total += (Complex64::new(diag, 0.0) - self.k[(i, j)] * (c[i] * c[i] * c[j])).norm_sqr();
            }
            total += n0 * c[i].powi(4) * self.k2d(i);
        }
        total
    }

    fn mse_gradient(&self, c: &[f64]) -> Vec<f64> {
        let u = c.len();
        (0..u)
            .map(|i| {
                // ĥᵢᴴ L1 (Ĥ D⁴ Ĥᴴ) L1 ĥᵢ = Σ_j c_j⁴ |K_ij|²
                let l2_term: f64 = (0..u).map(|j| c[j].powi(4) * self.k[(i, j)].norm_sqr()).sum();
                2.0 * c[i] * (1.0 + l2_term - 2.0 * c[i] * c[i] * self.kd(i))
            })
            .collect()
    }

    fn neg_capacity(&self, n0: f64) -> f64 {
        // log det(I + Ĥ D² Ĥᴴ / N0) = ln det(L1⁻¹) - B ln N0
        -(self.ln_det - self.antennas as f64 * n0.ln()) / LN_2
    }

    fn capacity_gradient(&self, c: &[f64]) -> Vec<f64> {
        // ĥᵢᴴ L3⁻¹ ĥᵢ / N0 = K_ii since L3⁻¹ = N0 L1
        (0..c.len()).map(|i| -2.0 * c[i] * LOG2_E * self.kd(i)).collect()
    }

    fn sinr_terms(&self, c: &[f64], gamma: &[f64], n0: f64) -> Vec<SinrTerms> {
        let u = c.len();
        let est_power: f64 = (0..u).map(|j| c[j] * c[j] * gamma[j]).sum();
        (0..u)
            .map(|v| {
                let w_norm = c[v] * c[v] * self.k2d(v);
                let interference = (0..u)
                    .filter(|&j| j != v)
                    .map(|j| c[v] * c[v] * c[j] * c[j] * self.k[(v, j)].norm_sqr())
                    .sum::<f64>();
                SinrTerms {
                    signal: c[v].powi(4) * self.kd(v).powi(2),
                    interference,
                    estimation: w_norm * est_power,
                    noise: n0 * w_norm,
                }
            })
            .collect()
    }

    fn neg_sum_rate(&self, c: &[f64], gamma: &[f64], n0: f64) -> f64 {
        -self
            .sinr_terms(c, gamma, n0)
            .iter()
            .map(|s| (1.0 + s.sinr()).log2())
            .sum::<f64>()
    }

    fn sum_rate_gradient(&self, c: &[f64], gamma: &[f64], n0: f64) -> Vec<f64> {
        let u = c.len();
        let terms = self.sinr_terms(c, gamma, n0);
        let est_power: f64 = (0..u).map(|j| c[j] * c[j] * gamma[j]).sum();
        let mut grad = vec![0.0; u];
        for (v, s) in terms.iter().enumerate() {
            let psi = s.denominator();
            if psi <= 0.0 {
                continue;
            }
            let sinr = s.signal / psi;
            let scale = -LOG2_E / (1.0 + sinr);
            let (cv, kvv, k2vv) = (c[v], self.kd(v), self.k2d(v));
            for i in 0..u {
                let ci = c[i];
                let (d_signal, d_interf, d_est, d_noise);
                if i == v {
                    d_signal = 4.0 * cv.powi(3) * kvv * kvv * (1.0 - cv * cv * kvv);
                    d_interf = (0..u)
                        .filter(|&j| j != v)
                        .map(|j| 2.0 * cv * c[j] * c[j] * self.k[(j, v)].norm_sqr() * (1.0 - 2.0 * cv * cv * kvv))
                        .sum::<f64>();
                    let dw = 2.0 * cv * (k2vv - 2.0 * cv * cv * k2vv * kvv);
                    d_est = dw * est_power + cv * cv * k2vv * 2.0 * cv * gamma[v];
                    d_noise = n0 * dw;
                } else {
                    let kiv2 = self.k[(i, v)].norm_sqr();
                    d_signal = -4.0 * cv.powi(4) * ci * kvv * kiv2;
                    // interferer j = i itself
                    let own = 2.0 * ci * cv * cv * kiv2 * (1.0 - 2.0 * ci * ci * self.kd(i));
                    // interferers j != i whose leakage changes through L1
                    let cross = (0..u)
                        .filter(|&j| j != v && j != i)
                        .map(|j| {
                            let triple = self.k[(j, i)] * self.k[(i, v)] * self.k[(v, j)];
                            -4.0 * cv * cv * c[j] * c[j] * ci * triple.re
                        })
                        .sum::<f64>();
                    d_interf = own + cross;
                    let mixed = (self.k2[(v, i)] * self.k[(i, v)]).re;
                    let dw = -4.0 * cv * cv * ci * mixed;
                    d_est = dw * est_power + cv * cv * k2vv * 2.0 * ci * gamma[i];
                    d_noise = n0 * dw;
                }
                let d_psi = d_interf + d_est + d_noise;
                let d_sinr = (d_signal * psi - s.signal * d_psi) / (psi * psi);
                grad[i] += scale * d_sinr;
            }
        }
        grad
    }
}

struct SinrTerms {
    signal: f64,
    interference: f64,
    estimation: f64,
    noise: f64,
}

impl SinrTerms {
    fn denominator(&self) -> f64 {
        self.interference + self.estimation + self.noise
    }

    fn sinr(&self) -> f64 {
        let psi = self.denominator();
        if psi > 0.0 {
            self.signal / psi
        } else {
            0.0
        }
    }
}

fn sum_slots(c: &DMatrix<f64>, mut f: impl FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
    let mut total = 0.0;
    for t in 0..c.ncols() {
        total += f(&column(c, t))?;
    }
    Ok(total)
}

fn stack_slots(c: &DMatrix<f64>, mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>) -> Result<DMatrix<f64>> {
    let mut g = DMatrix::zeros(c.nrows(), c.ncols());
    for t in 0..c.ncols() {
        g.set_column(t, &nalgebra::DVector::from_vec(f(&column(c, t))?));
    }
    Ok(g)
}

/// Post-LMMSE equalization MSE summed over slots, with `Ĥ` treated as the true channel.
pub fn cost_mse(c: &DMatrix<f64>, hhat: &CMatrix, n0: f64) -> Result<f64> {
    sum_slots(c, |ct| Ok(SlotSystem::new(hhat, ct, n0)?.mse(ct, n0)))
}

pub fn grad_mse(c: &DMatrix<f64>, hhat: &CMatrix, n0: f64) -> Result<DMatrix<f64>> {
    stack_slots(c, |ct| Ok(SlotSystem::new(hhat, ct, n0)?.mse_gradient(ct)))
}

/// Negative capacity `-Σ_t log2 det(I + Ĥ D² Ĥᴴ / N0)`.
pub fn cost_capacity(c: &DMatrix<f64>, hhat: &CMatrix, n0: f64) -> Result<f64> {
    sum_slots(c, |ct| Ok(SlotSystem::new(hhat, ct, n0)?.neg_capacity(n0)))
}

pub fn grad_capacity(c: &DMatrix<f64>, hhat: &CMatrix, n0: f64) -> Result<DMatrix<f64>> {
    stack_slots(c, |ct| Ok(SlotSystem::new(hhat, ct, n0)?.capacity_gradient(ct)))
}

/// Negative post-LMMSE sum of achievable rates.
pub fn cost_sum_rate(c: &DMatrix<f64>, hhat: &CMatrix, gamma: &[f64], n0: f64) -> Result<f64> {
    sum_slots(c, |ct| Ok(SlotSystem::new(hhat, ct, n0)?.neg_sum_rate(ct, gamma, n0)))
}

pub fn grad_sum_rate(c: &DMatrix<f64>, hhat: &CMatrix, gamma: &[f64], n0: f64) -> Result<DMatrix<f64>> {
    stack_slots(c, |ct| Ok(SlotSystem::new(hhat, ct, n0)?.sum_rate_gradient(ct, gamma, n0)))
}

/// `R(C) = -α Σ (C_ut - 1/2)²`.
pub fn regularizer(c: &DMatrix<f64>, alpha: f64) -> f64 {
    -alpha * c.iter().map(|x| (x - 0.5).powi(2)).sum::<f64>()
}

pub fn grad_regularizer(c: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    c.map(|x| -alpha * (2.0 * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one(re: f64) -> CMatrix {
        CMatrix::from_element(1, 1, Complex64::new(re, 0.0))
    }

    fn random_channel(b: usize, u: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(b, u, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 2.0)
    }

    #[test]
    fn equalizer_scalar_and_degenerate_cases() {
        let w = lmmse_weights(&one(1.0), &[1.0], 1.0).unwrap();
        assert!((w[(0, 0)].re - 0.5).abs() < 1e-15);
        let h = random_channel(4, 3, 1);
        assert!(lmmse_weights(&h, &[0.0; 3], 1.0).unwrap().iter().all(|z| z.norm() == 0.0));
        let far = lmmse_weights(&h, &[1.0; 3], 1e12).unwrap();
        assert!(linalg::frobenius(&far) < 1e-10);
        let mut bad = h.clone();
        bad[(0, 0)] = Complex64::new(f64::INFINITY, 0.0);
        assert!(lmmse_weights(&bad, &[1.0; 3], 1.0).is_err());
    }

    #[test]
    fn equalizer_forms_agree() {
        for (b, u) in [(4, 3), (8, 3), (3, 5), (6, 6)] {
            let h = random_channel(b, u, (b * 10 + u) as u64);
            let c: Vec<f64> = (0..u).map(|i| 0.2 + 0.15 * i as f64).collect();
            let a = lmmse_weights_bxb(&h, &c, 0.7).unwrap();
            let bb = lmmse_weights_uxu(&h, &c, 0.7).unwrap();
            assert!(linalg::frobenius(&(&a - &bb)) <= 1e-10 * linalg::frobenius(&a));
        }
    }

    #[test]
    fn l1_is_hermitian_positive_definite() {
        let h = random_channel(5, 4, 3);
        let eq = lmmse_equalizer(&h, &[0.3, 0.9, 0.5, 1.0], 0.4).unwrap();
        assert!(linalg::frobenius(&(&eq.l1 - eq.l1.adjoint())) < 1e-12);
        assert!(nalgebra::Cholesky::new(eq.l1.clone()).is_some());
        let expected = &eq.l1 * linalg::scale_columns(&h, &[0.3, 0.9, 0.5, 1.0]);
        assert!(linalg::frobenius(&(&expected - &eq.w)) < 1e-12);
    }

    #[test]
    fn mse_examples() {
        let zeros = DMatrix::zeros(3, 2);
        assert_eq!(cost_mse(&zeros, &random_channel(4, 3, 2), 1.0).unwrap(), 0.0);
        let onec = DMatrix::from_element(1, 1, 1.0);
        assert!((cost_mse(&onec, &one(1.0), 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mse_of_orthogonal_users_is_per_user() {
        // Orthogonal equal-norm columns: each active UE sees the same error
        // whether it shares the slot or not.
        let z = Complex64::new(0.0, 0.0);
        let a = Complex64::new(1.5, 0.0);
        let h = CMatrix::from_row_slice(2, 2, &[a, z, z, a]);
        let both = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let split = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let per_ue_both = cost_mse(&both, &h, 1.0).unwrap() / 2.0;
        let per_ue_split = cost_mse(&split, &h, 1.0).unwrap() / 2.0;
        assert!((per_ue_both - per_ue_split).abs() < 1e-14);
        // Closed form for a single UE: 1 - g/(g+N0) = N0/(g+N0)
        assert!((per_ue_both - 1.0 / (2.25 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(cost_capacity(&DMatrix::zeros(2, 2), &random_channel(3, 2, 5), 1.0).unwrap(), 0.0);
        // ||h||² = N0 → det = 2 → -1 bit
        let h = CMatrix::from_row_slice(2, 1, &[Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        let c = DMatrix::from_element(1, 1, 1.0);
        assert!((cost_capacity(&c, &h, 1.0).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn capacity_gradient_sign_and_zeros() {
        let h = random_channel(4, 3, 8);
        let c = DMatrix::from_row_slice(3, 2, &[0.0, 0.4, 0.7, 0.0, 1.0, 0.2]);
        let g = grad_capacity(&c, &h, 0.5).unwrap();
        assert!(g.iter().all(|&x| x <= 0.0));
        assert_eq!(g[(0, 0)], 0.0);
        assert_eq!(g[(1, 1)], 0.0);
    }

    #[test]
    fn sum_rate_examples() {
        assert_eq!(cost_sum_rate(&DMatrix::zeros(2, 1), &random_channel(2, 2, 1), &[0.1, 0.1], 1.0).unwrap(), 0.0);
        let c = DMatrix::from_element(1, 1, 1.0);
        let f = cost_sum_rate(&c, &one(1.0), &[1.0], 1.0).unwrap();
        assert!((f + 1.5f64.log2()).abs() < 1e-14);
        assert!((f + 0.584_962_500_721_156).abs() < 1e-12);
    }

    #[test]
    fn sum_rate_without_interferers_or_errors_is_matched_filter_snr() {
        let h = CMatrix::from_row_slice(2, 1, &[Complex64::new(1.0, 1.0), Complex64::new(0.5, -2.0)]);
        let n0 = 0.8;
        let c = DMatrix::from_element(1, 1, 1.0);
        let w = lmmse_weights(&h, &[1.0], n0).unwrap();
        let wh: Complex64 = w.column(0).iter().zip(h.column(0).iter()).map(|(a, b)| a.conj() * b).sum();
        let wn: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        let expected = -(1.0 + wh.norm_sqr() / (n0 * wn)).log2();
        assert!((cost_sum_rate(&c, &h, &[0.0], n0).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn zero_entries_have_zero_gradient() {
        let h = random_channel(4, 3, 4);
        let c = DMatrix::from_row_slice(3, 1, &[0.0, 0.5, 0.8]);
        assert_eq!(grad_mse(&c, &h, 1.0).unwrap()[(0, 0)], 0.0);
        assert_eq!(grad_sum_rate(&c, &h, &[0.1; 3], 1.0).unwrap()[(0, 0)], 0.0);
    }

    #[test]
    fn single_ue_sum_rate_gradient_has_no_interference() {
        // With one UE the interference block is empty; the gradient then
        // matches the derivative of -log2(1 + c² K² / (K2 (c² Γ + N0))).
        let h = CMatrix::from_row_slice(2, 1, &[Complex64::new(0.7, 0.2), Complex64::new(-0.4, 0.9)]);
        let (g0, n0) = (0.3, 0.5);
        let f = |x: f64| cost_sum_rate(&DMatrix::from_element(1, 1, x), &h, &[g0], n0).unwrap();
        let g = grad_sum_rate(&DMatrix::from_element(1, 1, 0.6), &h, &[g0], n0).unwrap()[(0, 0)];
        let fd = (f(0.6 + 1e-6) - f(0.6 - 1e-6)) / 2e-6;
        assert!((g - fd).abs() < 1e-6 * fd.abs().max(1.0));
    }

    #[test]
    fn regularizer_examples() {
        let half = DMatrix::from_element(2, 3, 0.5);
        assert!(grad_regularizer(&half, 3.0).iter().all(|&x| x == 0.0));
        let ones = DMatrix::from_element(1, 1, 1.0);
        assert_eq!(grad_regularizer(&ones, 2.5)[(0, 0)], -2.5);
        assert_eq!(regularizer(&ones, 0.0), 0.0);
        assert!(grad_regularizer(&ones, 0.0).iter().all(|&x| x == 0.0));
        assert_eq!(regularizer(&ones, 2.0), -0.5);
    }

    #[test]
    fn objective_spec_validates() {
        assert!(ObjectiveSpec::new(ObjectiveKind::Capacity, -1.0, 1.0).is_err());
        assert!(ObjectiveSpec::new(ObjectiveKind::Capacity, 1.0, 0.0).is_err());
        assert_eq!("sum-rate".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::SumRate);
        assert!("rate".parse::<ObjectiveKind>().is_err());
    }
}
