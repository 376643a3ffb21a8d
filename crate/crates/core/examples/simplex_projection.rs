//! Projects a vector onto `{x ∈ [0,1]^M : l_min ≤ Σx ≤ l_max}` and prints
//! the KKT certificate.

use mimo_sched::projection::{project_simplex, SimplexSpec};

fn main() -> mimo_sched::Result<()> {
    let q = [1.4, 0.9, 0.3, -0.2, 0.05];
    for (lower, upper) in [(0.0, 5.0), (1.0, 2.0), (3.0, 4.0)] {
        let spec = SimplexSpec::new(q.len(), lower, upper)?;
        let (p, cert) = project_simplex(&q, &spec)?;
        println!("sum in [{lower}, {upper}]");
        println!("  p        = {p:.4?}");
        println!("  sum      = {:.4}", p.iter().sum::<f64>());
        println!("  lambda   = {:.4} ({} at one, {} at zero)", cert.lambda, cert.ones, cert.zeros);
        println!("  residual = {:.1e}", cert.residual(&q, &p, &spec));
    }
    Ok(())
}
