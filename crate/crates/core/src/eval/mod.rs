//! Link-level evaluation of a fixed schedule.
//!
//! [`run_monte_carlo`] transmits random Gray-mapped QAM symbols through the
//! channel, equalizes with the LMMSE filter built from the channel estimate,
//! and yields one [`TrialRecord`] per trial and slot. [`MetricAccumulator`]
//! turns the records into per-UE BER, hard-output mutual information and MSE;
//! [`achievable_rate`] is computed directly from the channel. The [`stats`]
//! module summarizes per-UE samples across realizations.

mod metrics;
mod modulation;
mod montecarlo;
pub mod stats;

pub use metrics::{achievable_rate, evaluate, MetricAccumulator, UeMetrics};
pub use modulation::{Modulation, ModulationKind};
pub use montecarlo::{run_monte_carlo, MonteCarlo, TrialRecord};
