//! Schedules 16 UEs into two slots on one synthetic mmWave channel with each
//! objective and compares against the random and all-active baselines.

use mimo_sched::baselines::{aua_schedule, random_schedule};
use mimo_sched::channel::{ChannelModel, NORMALIZED_NOISE};
use mimo_sched::experiment::ExperimentConfig;
use mimo_sched::solver::schedule;
use mimo_sched::{ChannelSet, Objective, ObjectiveKind, ObjectiveSpec};

fn main() -> mimo_sched::Result<()> {
    let cfg = ExperimentConfig::preset("s1-desk")?;
    let scenario = cfg.scenario();
    let channel = ChannelSet::realize(&ChannelModel::for_kind(cfg.channel_model), &scenario, 42)?;
    let mse = ObjectiveSpec::new(ObjectiveKind::MseLmmse, 0.0, NORMALIZED_NOISE)?;
    let solver = mimo_sched::solver::FbsConfig { restarts: scenario.restarts, ..cfg.solver };
    for kind in ObjectiveKind::ALL {
        let objective = ObjectiveSpec::new(kind, cfg.alpha[kind.name()], NORMALIZED_NOISE)?;
        let result = schedule(&objective, &channel, &cfg.bounds, scenario.slots, &solver, 42)?;
        println!("{kind}: F = {:.4} (restart {}, {} iterations)", result.cost, result.restart, result.iterations);
        println!("  slot loads {:?}, sum MSE {:.4}", result.binary.column_sums(), mse.cost(result.binary.entries(), &channel)?);
        for w in &result.warnings {
            println!("  warning: {w}");
        }
    }
    let random = random_schedule(scenario.ues, scenario.slots, 42)?;
    let aua = aua_schedule(scenario.ues, scenario.slots);
    println!("random: sum MSE {:.4}", mse.cost(random.entries(), &channel)?);
    println!("aua:    sum MSE {:.4}", mse.cost(aua.entries(), &channel)?);
    Ok(())
}
