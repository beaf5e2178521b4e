//! Evaluate the maximal radius function at a configuration and inspect the
//! constraints that realize it.
//!
//!     cargo run --example evaluate_radius

use spherejam::container::{Configuration, ConstraintSet};
use spherejam::envelope;

fn main() -> spherejam::Result<()> {
    // Seven disks in the unit square, a hand-picked non-optimal arrangement.
    let x = Configuration::parse(spherejam::fixtures::SEVEN_DISKS_SQUARE)?;
    let cs = ConstraintSet::cube(x.n(), x.d())?;

    let g = envelope::g_value(&cs, &x);
    println!("n = {}, d = {}", x.n(), x.d());
    println!("maximal radius g(x) = {g:.12}");
    println!("admissible at r = 0.05: {}", envelope::is_admissible(&cs, &x, 0.05));

    // The active set collects all constraints within epsilon of the minimum.
    // At a generic point it is a single pair or wall; at a local maximum it
    // has at least dof + 1 members.
    for epsilon in [1e-9, 1e-2, 5e-2] {
        let active = envelope::active_set(&cs, &x, epsilon);
        println!("\nepsilon = {epsilon:.0e}: {} active constraints", active.len());
        for (id, v) in active.indices.iter().zip(&active.values) {
            println!("  {id}  value {v:.12}");
        }
    }

    // Moving disks 1 and 4 directly apart grows their pair constraint, the
    // unique envelope minimizer here, so the directional derivative is
    // positive.
    let active = envelope::active_set(&cs, &x, 1e-9);
    let mut v = vec![0.0; cs.dof()];
    let (p, q) = (x.point(0), x.point(3));
    let dist = 2.0 * envelope::g_value(&cs, &x);
    for k in 0..2 {
        v[k] = (p[k] - q[k]) / (2.0 * dist);
        v[6 + k] = (q[k] - p[k]) / (2.0 * dist);
    }
    let dd = envelope::directional_derivative(&cs, &x, &active, &v)?;
    println!("\ndirectional derivative along the separating direction: {dd:.12}");
    Ok(())
}
