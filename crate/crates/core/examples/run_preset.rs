//! Runs a shrunken copy of a built-in preset and writes its reports.
//!
//! Usage: `cargo run --release --example run_preset -- [preset] [out_dir]`

use mimo_sched::experiment::{preset_names, run_experiment, ExperimentConfig};

fn main() -> mimo_sched::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "s1-desk".into());
    let out = args.next().unwrap_or_else(|| format!("out/example-{name}"));
    println!("presets: {}", preset_names().join(", "));
    let mut cfg = ExperimentConfig::preset(&name)?;
    cfg.realizations = 4;
    cfg.trials = 1000;
    let report = run_experiment(&cfg)?;
    report.write(out.as_ref())?;
    print!("{}", report.summary_table());
    println!("wrote {out}");
    Ok(())
}
