use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square QAM orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulationKind {
    Qpsk,
    Qam16,
    Qam64,
}

impl ModulationKind {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            ModulationKind::Qpsk => 2,
            ModulationKind::Qam16 => 4,
            ModulationKind::Qam64 => 6,
        }
    }

    pub fn from_bits(bits: usize) -> Result<Self> {
        match bits {
            2 => Ok(ModulationKind::Qpsk),
            4 => Ok(ModulationKind::Qam16),
            6 => Ok(ModulationKind::Qam64),
            _ => Err(Error::InvalidScenario(format!("no square QAM with {bits} bits per symbol"))),
        }
    }
}

impl fmt::Display for ModulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModulationKind::Qpsk => "qpsk",
            ModulationKind::Qam16 => "qam16",
            ModulationKind::Qam64 => "qam64",
        })
    }
}

impl FromStr for ModulationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qpsk" => Ok(ModulationKind::Qpsk),
            "qam16" => Ok(ModulationKind::Qam16),
            "qam64" => Ok(ModulationKind::Qam64),
            _ => Err(Error::Parse(format!("unknown modulation {s:?}"))),
        }
    }
}

/// Gray-mapped square QAM with unit average symbol energy.
///
/// A symbol index packs `Q` bits, most significant first; the first `Q/2`
/// bits select the in-phase level and the rest the quadrature level, each
/// through a Gray-coded PAM.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulation {
    kind: ModulationKind,
    /// PAM amplitude indexed by the Gray label of the level.
    amplitude: Vec<f64>,
    scale: f64,
}

impl Modulation {
    pub fn new(kind: ModulationKind) -> Self {
        let levels = 1usize << (kind.bits_per_symbol() / 2);
        let order = (levels * levels) as f64;
        let scale = (3.0 / (2.0 * (order - 1.0))).sqrt();
        let mut amplitude = vec![0.0; levels];
        for k in 0..levels {
            amplitude[k ^ (k >> 1)] = (2.0 * k as f64 - (levels as f64 - 1.0)) * scale;
        }
        Self { kind, amplitude, scale }
    }

    pub fn kind(&self) -> ModulationKind {
        self.kind
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.kind.bits_per_symbol()
    }

    pub fn order(&self) -> usize {
        1 << self.bits_per_symbol()
    }

    fn half(&self) -> usize {
        self.bits_per_symbol() / 2
    }

    pub fn symbol(&self, index: usize) -> Complex64 {
        let h = self.half();
        let mask = (1 << h) - 1;
        Complex64::new(self.amplitude[index >> h & mask], self.amplitude[index & mask])
    }

    /// Gray label of the nearest PAM level.
    fn slice(&self, x: f64) -> usize {
        let levels = self.amplitude.len();
        let k = ((x / self.scale + (levels as f64 - 1.0)) / 2.0).round();
        let k = k.clamp(0.0, levels as f64 - 1.0) as usize;
        k ^ (k >> 1)
    }

    /// Index of the constellation point nearest to `z`.
    pub fn demap(&self, z: Complex64) -> usize {
        self.slice(z.re) << self.half() | self.slice(z.im)
    }

    /// Bit `i` (0 = most significant) of a symbol index.
    pub fn bit(&self, index: usize, i: usize) -> u8 {
        (index >> (self.bits_per_symbol() - 1 - i) & 1) as u8
    }

    pub fn average_energy(&self) -> f64 {
        (0..self.order()).map(|i| self.symbol(i).norm_sqr()).sum::<f64>() / self.order() as f64
    }
}
