//! Runs the Monte-Carlo link simulation for one schedule and prints per-UE
//! BER, HMI, MSE and achievable rate with their 90th percentiles.

use mimo_sched::channel::ChannelModel;
use mimo_sched::eval::stats::{percentile90, Direction};
use mimo_sched::eval::{evaluate, Modulation, ModulationKind};
use mimo_sched::{ChannelSet, Scenario, SchedulingMatrix};

fn main() -> mimo_sched::Result<()> {
    let scenario = Scenario { antennas: 8, aps: 4, antennas_per_ap: 2, ues: 6, slots: 2, tx_power: 0.01, bits_per_symbol: 4, ..Scenario::default() };
    let channel = ChannelSet::realize(&ChannelModel::cell_free(), &scenario, 11)?;
    let c = SchedulingMatrix::from_rows(&[vec![1, 0], vec![1, 0], vec![1, 1], vec![0, 1], vec![0, 1], vec![0, 0]])?;
    let metrics = evaluate(&channel, &c, &Modulation::new(ModulationKind::Qam16), 5000, 11)?;
    println!("{:>3} {:>9} {:>7} {:>9} {:>7}", "ue", "BER", "HMI", "MSE dB", "rate");
    let show = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
    for (u, m) in metrics.iter().enumerate() {
        println!("{u:>3} {:>9} {:>7} {:>9} {:>7.3}", show(m.ber), show(m.hmi), show(m.mse_db()), m.rate);
    }
    let ber: Vec<f64> = metrics.iter().filter_map(|m| m.ber).collect();
    let hmi: Vec<f64> = metrics.iter().filter_map(|m| m.hmi).collect();
    println!("BER@90% {:.4}, HMI@90% {:.4}", percentile90(&ber, Direction::Cdf).unwrap(), percentile90(&hmi, Direction::Ccdf).unwrap());
    Ok(())
}
