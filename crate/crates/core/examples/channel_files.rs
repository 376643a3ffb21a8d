//! Writes synthetic channels in the text import format and runs an
//! experiment on the imported files.

use mimo_sched::channel::{generate_channel, read_channel, write_channel, ChannelModel};
use mimo_sched::experiment::{run_experiment, ExperimentConfig};

fn main() -> mimo_sched::Result<()> {
    let dir = std::env::temp_dir().join("mimo-sched-channels");
    std::fs::create_dir_all(&dir)?;
    let mut cfg = ExperimentConfig::preset("s4-desk")?;
    let scenario = cfg.scenario();
    cfg.realizations = 3;
    cfg.trials = 500;
    cfg.methods = vec!["mse-lmmse".into(), "random".into(), "aua".into()];
    for r in 0..cfg.realizations {
        let hbar = generate_channel(&ChannelModel::cell_free(), &scenario, 1000 + r as u64);
        write_channel(&dir.join(format!("{r}.txt")), &hbar, scenario.aps, scenario.antennas_per_ap)?;
    }
    let (header, hbar) = read_channel(&dir.join("0.txt"))?;
    println!("{}: B={} U={} L={} n_A={}, |h_00| = {:.3e}", dir.display(), header.antennas, header.ues, header.aps, header.antennas_per_ap, hbar[(0, 0)].norm());
    cfg.channel_dir = Some(dir);
    print!("{}", run_experiment(&cfg)?.summary_table());
    Ok(())
}
