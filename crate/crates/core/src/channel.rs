//! Synthetic channel generation, power control and noisy channel estimates.
//!
//! Two geometric models are provided: a sparse multipath model seen by a
//! single uniform linear array (mmWave) and a distributed-AP model with
//! log-distance path loss and Rayleigh fading (cell-free). Both place UEs
//! uniformly at random in a rectangular area.
//!
//! All link-budget scaling is folded into the effective channel
//! `H = sqrt(rho/N0) * Hbar * Delta`, so receive noise and the LMMSE
//! regularization downstream use unit noise power.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::Scenario;
use crate::rng::{self, Purpose};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Noise power in the normalized (effective-channel) domain.
pub const NORMALIZED_NOISE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    MmwaveUla,
    CellfreeRayleigh,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::MmwaveUla => "mmwave-ula",
            ChannelKind::CellfreeRayleigh => "cellfree-rayleigh",
        })
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mmwave-ula" => Ok(ChannelKind::MmwaveUla),
            "cellfree-rayleigh" => Ok(ChannelKind::CellfreeRayleigh),
            other => Err(Error::Parse(format!("unknown channel model {other:?}"))),
        }
    }
}

/// Geometry and propagation parameters of a synthetic channel model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    /// Area width (x) and depth (y) in meters.
    pub area: (f64, f64),
    pub ap_height: f64,
    pub ue_height: f64,
    pub carrier_hz: f64,
    /// Propagation paths per UE (mmWave only); the first is line of sight.
    pub paths: usize,
    /// Mean power of each scattered path relative to line of sight, in dB.
    pub scatter_power_db: f64,
    /// Antenna spacing in wavelengths.
    pub antenna_spacing: f64,
    /// Log-distance path-loss exponent (cell-free only).
    pub path_loss_exponent: f64,
    /// Distance below which free-space loss applies (cell-free only).
    pub reference_distance: f64,
}

impl ChannelModel {
    /// 60 GHz base station with a half-wavelength ULA over a 150 m x 200 m area.
    pub fn mmwave() -> Self {
        Self {
            kind: ChannelKind::MmwaveUla,
            area: (150.0, 200.0),
            ap_height: 15.0,
            ue_height: 1.65,
            carrier_hz: 60e9,
            paths: 3,
            scatter_power_db: -10.0,
            antenna_spacing: 0.5,
            path_loss_exponent: 2.0,
            reference_distance: 1.0,
        }
    }

    /// 1.9 GHz distributed APs over a 200 m x 300 m area.
    pub fn cell_free() -> Self {
        Self {
            kind: ChannelKind::CellfreeRayleigh,
            area: (200.0, 300.0),
            ap_height: 15.0,
            ue_height: 1.65,
            carrier_hz: 1.9e9,
            paths: 1,
            scatter_power_db: -10.0,
            antenna_spacing: 0.5,
            path_loss_exponent: 3.5,
            reference_distance: 10.0,
        }
    }

    pub fn for_kind(kind: ChannelKind) -> Self {
        match kind {
            ChannelKind::MmwaveUla => Self::mmwave(),
            ChannelKind::CellfreeRayleigh => Self::cell_free(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (w, d) = self.area;
        if !(w > 0.0 && d > 0.0) {
            return Err(Error::InvalidScenario(format!("area {w} x {d} must be positive")));
        }
        if self.paths == 0 {
            return Err(Error::InvalidScenario("path count must be at least 1".into()));
        }
        if !(self.carrier_hz > 0.0 && self.reference_distance > 0.0 && self.antenna_spacing > 0.0) {
            return Err(Error::InvalidScenario(
                "carrier, reference distance and antenna spacing must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Access-point positions: one BS centered on the `y = 0` edge for mmWave,
    /// a regular grid of `aps` sites for cell-free.
    pub fn ap_positions(&self, aps: usize) -> Vec<Position> {
        let (w, d) = self.area;
        match self.kind {
            ChannelKind::MmwaveUla => vec![Position::new(w / 2.0, 0.0, self.ap_height); aps.max(1)],
            ChannelKind::CellfreeRayleigh => {
                let cols = (aps as f64).sqrt().ceil().max(1.0) as usize;
                let rows = aps.div_ceil(cols);
                (0..aps)
                    .map(|i| {
                        let (r, c) = (i / cols, i % cols);
                        Position::new(
                            (c as f64 + 0.5) * w / cols as f64,
                            (r as f64 + 0.5) * d / rows as f64,
                            self.ap_height,
                        )
                    })
                    .collect()
            }
        }
    }

    /// Draws `ues` positions uniformly over the area.
    pub fn place_ues(&self, ues: usize, rng: &mut ChaCha8Rng) -> Vec<Position> {
        let (w, d) = self.area;
        (0..ues)
            .map(|_| Position::new(rng.random::<f64>() * w, rng.random::<f64>() * d, self.ue_height))
            .collect()
    }

    /// Large-scale amplitude gain between an AP and a UE.
    pub fn path_amplitude(&self, ap: &Position, ue: &Position) -> f64 {
        let lambda = self.wavelength();
        let dist = ap.distance(ue);
        match self.kind {
            ChannelKind::MmwaveUla => lambda / (4.0 * PI * dist),
            ChannelKind::CellfreeRayleigh => {
                let d0 = self.reference_distance;
                let fspl_db = 20.0 * (4.0 * PI * d0 / lambda).log10();
                let loss_db = if dist <= d0 {
                    20.0 * (4.0 * PI * dist / lambda).log10()
                } else {
                    fspl_db + 10.0 * self.path_loss_exponent * (dist / d0).log10()
                };
                10f64.powf(-loss_db / 20.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2) + (self.z - other.z).powi(2)).sqrt()
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

/// ULA response `exp(j 2 pi spacing n sin(theta))` for `n = 0..antennas`.
pub fn steering_vector(antennas: usize, spacing: f64, angle: f64) -> Vec<Complex64> {
    (0..antennas)
        .map(|n| Complex64::from_polar(1.0, 2.0 * PI * spacing * n as f64 * angle.sin()))
        .collect()
}

/// Generates the raw `B x U` channel for UEs at the given positions.
pub fn generate_channel_at(
    model: &ChannelModel,
    scenario: &Scenario,
    ues: &[Position],
    seed: u64,
) -> CMatrix {
    let mut rng = rng::stream(seed, Purpose::Channel, &[]);
    let b = scenario.antennas;
    let mut h = CMatrix::zeros(b, ues.len());
    match model.kind {
        ChannelKind::MmwaveUla => {
            let bs = model.ap_positions(1)[0];
            let lambda = model.wavelength();
            let scatter = 10f64.powf(model.scatter_power_db / 20.0);
            for (u, ue) in ues.iter().enumerate() {
                let dist = bs.distance(ue);
                let los_angle = (ue.x - bs.x).atan2(ue.y - bs.y);
                let amp = model.path_amplitude(&bs, ue);
                let mut add_path = |gain: Complex64, angle: f64| {
                    let a = steering_vector(b, model.antenna_spacing, angle);
                    for (i, ai) in a.into_iter().enumerate() {
                        h[(i, u)] += gain * ai;
                    }
                };
                add_path(Complex64::from_polar(amp, -2.0 * PI * dist / lambda), los_angle);
                for _ in 1..model.paths {
                    let angle = (rng.random::<f64>() - 0.5) * PI;
                    let gain = complex_gaussian(&mut rng, 1.0) * (amp * scatter);
                    add_path(gain, angle);
                }
            }
        }
        ChannelKind::CellfreeRayleigh => {
            let aps = model.ap_positions(scenario.aps);
            for (u, ue) in ues.iter().enumerate() {
                for i in 0..b {
                    let ap = &aps[i / scenario.antennas_per_ap];
                    let amp = model.path_amplitude(ap, ue);
                    h[(i, u)] = complex_gaussian(&mut rng, 1.0) * amp;
                }
            }
        }
    }
    h
}

/// Places `U` UEs at random and generates their raw channel; deterministic in `seed`.
pub fn generate_channel(model: &ChannelModel, scenario: &Scenario, seed: u64) -> CMatrix {
    let mut placement = rng::stream(seed, Purpose::Placement, &[]);
    let ues = model.place_ues(scenario.ues, &mut placement);
    generate_channel_at(model, scenario, &ues, seed)
}

/// Power-control coefficients limiting the receive-power spread to `eta_db`.
pub fn power_control(hbar: &CMatrix, eta_db: f64) -> Result<Vec<f64>> {
    let norms: Vec<f64> = hbar
        .column_iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
        .collect();
    if let Some(u) = norms.iter().position(|&n| !(n > 0.0)) {
        return Err(Error::UnreachableUe(u));
    }
    let weakest = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let ceiling = 10f64.powf(eta_db / 10.0) * weakest;
    Ok(norms.iter().map(|&n| (n.min(ceiling) / n).sqrt()).collect())
}

/// `sqrt(rho/N0) * Hbar * diag(delta)`.
pub fn effective_channel(hbar: &CMatrix, delta: &[f64], tx_power: f64, noise_power: f64) -> CMatrix {
    let snr = (tx_power / noise_power).sqrt();
    let mut h = hbar.clone();
    for (mut col, &d) in h.column_iter_mut().zip(delta) {
        col *= Complex64::new(snr * d, 0.0);
    }
    h
}

/// Result of least-squares channel estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub hhat: CMatrix,
    pub error: CMatrix,
    pub gamma: Vec<f64>,
}

/// `Hhat = H + E` with i.i.d. `CN(0, n0/U)` errors.
pub fn estimate_channel(h: &CMatrix, n0: f64, ues: usize, seed: u64) -> Estimate {
    let mut rng = rng::stream(seed, Purpose::Estimation, &[]);
    let variance = n0 / ues as f64;
    let error = CMatrix::from_fn(h.nrows(), h.ncols(), |_, _| complex_gaussian(&mut rng, variance));
    Estimate {
        hhat: h + &error,
        error,
        gamma: vec![variance; h.ncols()],
    }
}

/// Thermal noise model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub bandwidth_hz: f64,
    pub boltzmann: f64,
    pub temperature_k: f64,
    pub noise_figure_db: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            bandwidth_hz: 100e6,
            boltzmann: 1.381e-23,
            temperature_k: 290.0,
            noise_figure_db: 9.0,
        }
    }
}

/// `W * k_B * T0 * 10^(NF/10)` in watts.
pub fn noise_power(nm: &NoiseModel) -> f64 {
    nm.bandwidth_hz * nm.boltzmann * nm.temperature_k * 10f64.powf(nm.noise_figure_db / 10.0)
}

/// One channel realization with everything the solver and evaluator need.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub hbar: CMatrix,
    pub delta: Vec<f64>,
    pub h: CMatrix,
    pub hhat: CMatrix,
    pub error: CMatrix,
    pub gamma: Vec<f64>,
}

impl ChannelSet {
    /// Power control, scaling and estimation applied to a raw channel.
    pub fn from_raw(hbar: CMatrix, scenario: &Scenario, seed: u64) -> Result<Self> {
        if hbar.nrows() != scenario.antennas || hbar.ncols() != scenario.ues {
            return Err(Error::Dimension(format!(
                "channel is {}x{}, scenario expects {}x{}",
                hbar.nrows(),
                hbar.ncols(),
                scenario.antennas,
                scenario.ues
            )));
        }
        let delta = power_control(&hbar, scenario.eta_db)?;
        let h = effective_channel(&hbar, &delta, scenario.tx_power, scenario.noise_power);
        let Estimate { hhat, error, gamma } = estimate_channel(&h, NORMALIZED_NOISE, scenario.ues, seed);
        Ok(Self {
            hbar,
            delta,
            h,
            hhat,
            error,
            gamma,
        })
    }

    /// Draws a fresh synthetic realization.
    pub fn realize(model: &ChannelModel, scenario: &Scenario, seed: u64) -> Result<Self> {
        let hbar = generate_channel(model, scenario, seed);
        Self::from_raw(hbar, scenario, seed)
    }

    /// A realization with perfect channel knowledge (`Hhat = H`, no estimation error).
    pub fn perfect(h: CMatrix) -> Self {
        let u = h.ncols();
        Self {
            hbar: h.clone(),
            delta: vec![1.0; u],
            error: CMatrix::zeros(h.nrows(), u),
            hhat: h.clone(),
            h,
            gamma: vec![0.0; u],
        }
    }

    /// A realization given the true channel and its estimate; `gamma` are the error variances.
    pub fn from_estimate(h: CMatrix, hhat: CMatrix, gamma: Vec<f64>) -> Result<Self> {
        if h.shape() != hhat.shape() || gamma.len() != h.ncols() {
            return Err(Error::Dimension("channel, estimate and gamma disagree".into()));
        }
        let u = h.ncols();
        Ok(Self {
            hbar: h.clone(),
            delta: vec![1.0; u],
            error: &hhat - &h,
            hhat,
            h,
            gamma,
        })
    }

    pub fn antennas(&self) -> usize {
        self.hhat.nrows()
    }

    pub fn ues(&self) -> usize {
        self.hhat.ncols()
    }
}

/// Header of an exported channel file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelHeader {
    pub antennas: usize,
    pub ues: usize,
    pub aps: usize,
    pub antennas_per_ap: usize,
}

/// Writes a raw channel as text: a `B U L n_A` header line, then one line per
/// antenna with interleaved real and imaginary parts of each UE's coefficient.
pub fn write_channel(path: &Path, hbar: &CMatrix, aps: usize, antennas_per_ap: usize) -> Result<()> {
    std::fs::write(path, format_channel(hbar, aps, antennas_per_ap))?;
    Ok(())
}

pub fn format_channel(hbar: &CMatrix, aps: usize, antennas_per_ap: usize) -> String {
    let mut out = format!("{} {} {} {}\n", hbar.nrows(), hbar.ncols(), aps, antennas_per_ap);
    for row in hbar.row_iter() {
        let vals: Vec<String> = row.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]).collect();
        out.push_str(&vals.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_channel(path: &Path) -> Result<(ChannelHeader, CMatrix)> {
    parse_channel(&std::fs::read_to_string(path)?)
}

pub fn parse_channel(text: &str) -> Result<(ChannelHeader, CMatrix)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header: Vec<usize> = lines
        .next()
        .ok_or_else(|| Error::Parse("missing channel header".into()))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad header field {t:?}: {e}"))))
        .collect::<Result<_>>()?;
    let [antennas, ues, aps, antennas_per_ap] = header[..] else {
        return Err(Error::Parse("header must be `B U L n_A`".into()));
    };
    if antennas != aps * antennas_per_ap {
        return Err(Error::Parse(format!("header B={antennas} != L*n_A={aps}*{antennas_per_ap}")));
    }
    let mut h = CMatrix::zeros(antennas, ues);
    for b in 0..antennas {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing row {b} of the channel")))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad value {t:?}: {e}"))))
            .collect::<Result<_>>()?;
        if vals.len() != 2 * ues {
            return Err(Error::Parse(format!("row {b} has {} values, expected {}", vals.len(), 2 * ues)));
        }
        for u in 0..ues {
            h[(b, u)] = Complex64::new(vals[2 * u], vals[2 * u + 1]);
        }
    }
    if lines.next().is_some() {
        return Err(Error::Parse("trailing data after the channel rows".into()));
    }
    Ok((
        ChannelHeader {
            antennas,
            ues,
            aps,
            antennas_per_ap,
        },
        h,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scenario(b: usize, l: usize, u: usize) -> Scenario {
        Scenario {
            antennas: b,
            aps: l,
            antennas_per_ap: b / l,
            ues: u,
            slots: 2,
            tx_power: 0.1,
            eta_db: 6.0,
            noise_power: noise_power(&NoiseModel::default()),
            bits_per_symbol: 2,
            restarts: 1,
        }
    }

    #[test]
    fn broadside_single_path_has_equal_phases() {
        let mut model = ChannelModel::mmwave();
        model.paths = 1;
        let sc = scenario(8, 1, 1);
        let ue = Position::new(model.area.0 / 2.0, 80.0, model.ue_height);
        let h = generate_channel_at(&model, &sc, &[ue], 3);
        let first = h[(0, 0)];
        for i in 1..8 {
            assert!((h[(i, 0)] - first).norm() < 1e-12 * first.norm());
        }
    }

    #[test]
    fn colocated_ues_see_identical_path_loss() {
        let model = ChannelModel::cell_free();
        let ue = Position::new(40.0, 70.0, model.ue_height);
        for ap in model.ap_positions(8) {
            assert_eq!(model.path_amplitude(&ap, &ue), model.path_amplitude(&ap, &ue.clone()));
        }
        // Same position, different fading draws, same large-scale power on average.
        let sc = scenario(16, 8, 2);
        let h = generate_channel_at(&model, &sc, &[ue, ue], 11);
        assert_ne!(h.column(0), h.column(1));
    }

    #[test]
    fn generation_is_deterministic() {
        for model in [ChannelModel::mmwave(), ChannelModel::cell_free()] {
            let sc = scenario(16, if model.kind == ChannelKind::MmwaveUla { 1 } else { 8 }, 6);
            assert_eq!(generate_channel(&model, &sc, 5), generate_channel(&model, &sc, 5));
            assert_ne!(generate_channel(&model, &sc, 5), generate_channel(&model, &sc, 6));
        }
    }

    #[test]
    fn power_control_examples() {
        let eq = CMatrix::from_fn(3, 2, |i, j| Complex64::new(if (i + j) % 2 == 0 { 1.0 } else { -1.0 }, 0.0));
        assert_eq!(power_control(&eq, 6.0).unwrap(), vec![1.0, 1.0]);

        // ||h_0||^2 = 100 m, ||h_1||^2 = m with m = 2.
        let h = CMatrix::from_row_slice(1, 2, &[Complex64::new(200f64.sqrt(), 0.0), Complex64::new(0.0, 2f64.sqrt())]);
        let d = power_control(&h, 6.0).unwrap();
        assert_eq!(d[1], 1.0);
        assert!((d[0] * d[0] - 10f64.powf(0.6) / 100.0).abs() < 1e-15);
        assert!((d[0] - 0.199526).abs() < 1e-6);

        let zero = CMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(matches!(power_control(&zero, 6.0), Err(Error::UnreachableUe(1))));
    }

    #[test]
    fn effective_channel_scaling() {
        let hbar = CMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64));
        assert_eq!(effective_channel(&hbar, &[1.0, 1.0], 2.0, 2.0), hbar);
        assert_eq!(effective_channel(&hbar, &[1.0, 1.0], 8.0, 2.0), &hbar * Complex64::new(2.0, 0.0));
        let half = effective_channel(&hbar, &[0.5, 1.0], 1.0, 1.0);
        assert_eq!(half.column(0), hbar.column(0) * Complex64::new(0.5, 0.0));
        assert_eq!(half.column(1), hbar.column(1));
    }

    #[test]
    fn estimation_error_statistics() {
        let h = CMatrix::from_element(1000, 1000, Complex64::new(0.3, -0.2));
        let est = estimate_channel(&h, 2.0, 4, 9);
        let residual = (est.hhat.clone() - &h - &est.error).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(residual < 1e-15);
        let var = est.error.iter().map(|z| z.norm_sqr()).sum::<f64>() / 1e6;
        assert!((var - 0.5).abs() < 0.005, "variance {var}");
        assert!(est.gamma.iter().all(|&g| g * 4.0 / 2.0 == 1.0));
        assert_eq!(estimate_channel(&h, 2.0, 4, 9), est);

        let noiseless = estimate_channel(&h, 0.0, 4, 9);
        assert_eq!(noiseless.hhat, h);
        assert!(noiseless.gamma.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn noise_power_examples() {
        let nm = NoiseModel::default();
        assert!((noise_power(&nm) - 3.1812e-12).abs() < 1e-15);
        let flat = NoiseModel { noise_figure_db: 0.0, ..nm };
        assert_eq!(noise_power(&flat), nm.bandwidth_hz * nm.boltzmann * nm.temperature_k);
        let wide = NoiseModel { bandwidth_hz: 2.0 * nm.bandwidth_hz, ..nm };
        assert!((noise_power(&wide) / noise_power(&nm) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn channel_file_round_trip() {
        let sc = scenario(4, 2, 3);
        let h = generate_channel(&ChannelModel::cell_free(), &sc, 1);
        let (hdr, back) = parse_channel(&format_channel(&h, 2, 2)).unwrap();
        assert_eq!(back, h);
        assert_eq!(hdr, ChannelHeader { antennas: 4, ues: 3, aps: 2, antennas_per_ap: 2 });
        assert!(parse_channel("4 3 2 2\n1 2\n").is_err());
        assert!(parse_channel("4 3 3 2\n").is_err());
    }

    proptest! {
        #[test]
        fn power_control_never_amplifies_and_bounds_spread(
            norms in proptest::collection::vec(1e-6f64..1e3, 1..8),
            eta in 0.0f64..30.0,
        ) {
            let h = CMatrix::from_fn(1, norms.len(), |_, j| Complex64::new(norms[j].sqrt(), 0.0));
            let d = power_control(&h, eta).unwrap();
            prop_assert!(d.iter().all(|&x| x > 0.0 && x <= 1.0));
            let powers: Vec<f64> = norms.iter().zip(&d).map(|(n, x)| n * x * x).collect();
            let hi = powers.iter().copied().fold(0.0, f64::max);
            let lo = powers.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(hi / lo <= 10f64.powf(eta / 10.0) * (1.0 + 1e-12));
        }
    }
}
