//! Evaluates the three scheduling objectives, their gradients and the LMMSE
//! equalizer on one synthetic channel.

use mimo_sched::channel::{ChannelModel, NORMALIZED_NOISE};
use mimo_sched::objectives::lmmse_equalizer;
use mimo_sched::{ChannelSet, Objective, ObjectiveKind, ObjectiveSpec, Scenario};
use nalgebra::DMatrix;

fn main() -> mimo_sched::Result<()> {
    let scenario = Scenario { antennas: 8, antennas_per_ap: 8, ues: 4, slots: 2, ..Scenario::default() };
    let channel = ChannelSet::realize(&ChannelModel::mmwave(), &scenario, 3)?;
    let c = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.5, 0.5, 0.0, 1.0, 0.8, 0.2]);
    for kind in ObjectiveKind::ALL {
        let spec = ObjectiveSpec::new(kind, 1.0, NORMALIZED_NOISE)?;
        println!("{kind}: F = {:.4}, F + R = {:.4}", spec.cost(&c, &channel)?, spec.regularized_cost(&c, &channel)?);
        println!("  gradient {:.4}", spec.gradient(&c, &channel)?);
    }
    let eq = lmmse_equalizer(&channel.hhat, &[1.0, 1.0, 0.0, 1.0], NORMALIZED_NOISE)?;
    println!("LMMSE equalizer for slot mask [1,1,0,1]: {} x {}", eq.w.nrows(), eq.w.ncols());
    Ok(())
}
