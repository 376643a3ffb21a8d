//! Finds the optimal schedule of a small instance by enumeration and compares
//! it with the relaxation-based solver.

use mimo_sched::baselines::{count_schedules, exhaustive_search, DEFAULT_ES_CAP};
use mimo_sched::channel::{ChannelModel, NORMALIZED_NOISE};
use mimo_sched::solver::{schedule, FbsConfig};
use mimo_sched::{ChannelSet, ConstraintBox, Objective, ObjectiveKind, ObjectiveSpec, Scenario};

fn main() -> mimo_sched::Result<()> {
    let scenario = Scenario { antennas: 6, antennas_per_ap: 6, ues: 8, slots: 2, ..Scenario::default() };
    let bounds = ConstraintBox::new(3, 5, 1, 2)?;
    let count = count_schedules(scenario.ues, scenario.slots, &bounds, DEFAULT_ES_CAP)?;
    println!("{count} feasible schedules in {bounds}");
    let channel = ChannelSet::realize(&ChannelModel::mmwave(), &scenario, 7)?;
    for kind in ObjectiveKind::ALL {
        let plain = ObjectiveSpec::new(kind, 0.0, NORMALIZED_NOISE)?;
        let es = exhaustive_search(&plain, &channel, &bounds, scenario.slots, DEFAULT_ES_CAP)?;
        let ours = schedule(
            &ObjectiveSpec::new(kind, 1.0, NORMALIZED_NOISE)?,
            &channel,
            &bounds,
            scenario.slots,
            &FbsConfig { restarts: 10, ..FbsConfig::default() },
            7,
        )?;
        let cost = plain.cost(ours.binary.entries(), &channel)?;
        println!("{kind}: optimum {:.4}, solver {:.4}", es.cost, cost);
        print!("{}", es.binary.to_text());
    }
    Ok(())
}
