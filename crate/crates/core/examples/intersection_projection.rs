//! Projects a matrix onto the scheduling constraint set with Douglas-Rachford
//! splitting: column sums in `[ue_min, ue_max]`, row sums in `[slot_min, slot_max]`.

use mimo_sched::projection::{project_intersection, DrsConfig};
use mimo_sched::ConstraintBox;
use nalgebra::DMatrix;

fn main() -> mimo_sched::Result<()> {
    let z = DMatrix::from_row_slice(4, 3, &[0.9, 1.3, -0.1, 0.2, 0.4, 0.8, 1.1, -0.5, 0.6, 0.0, 0.7, 0.7]);
    let bounds = ConstraintBox::new(1, 2, 1, 2)?;
    let out = project_intersection(&z, &bounds, &DrsConfig::default())?;
    println!("input {z}");
    println!("projection onto {bounds} {:.4}", out.v);
    println!("iterations {}, converged {}", out.iterations, out.converged);
    println!("slots per UE {:.4?}", out.v.column_sum().iter().collect::<Vec<_>>());
    println!("UEs per slot {:.4?}", out.v.row_sum().iter().collect::<Vec<_>>());
    Ok(())
}
