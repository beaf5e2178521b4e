//! Run the active-set ascent from one starting configuration and print the
//! iteration trace.
//!
//!     cargo run --release --example maximize_single_start

use spherejam::container::{Configuration, ConstraintSet};
use spherejam::optimizer::{maximize, OptimizerParams};

fn main() -> spherejam::Result<()> {
    // Two disks in the unit square. The optimal arrangement puts them in
    // opposite corners with r = (2 - sqrt(2)) / 2.
    let cs = ConstraintSet::cube(2, 2)?;
    let x0 = Configuration::new(2, 2, vec![0.31, 0.42, 0.56, 0.63])?;

    let params = OptimizerParams {
        rng_seed: 11,
        ..OptimizerParams::default()
    };
    let record = maximize(&cs, &x0, &params)?;

    println!("iter  g                      active  residual^2          step        event");
    for row in &record.trace {
        println!(
            "{:>4}  {:<21.15}  {:>6}  {:<18.12}  {:>9.3e}  {}",
            row.iter,
            row.g_value,
            row.active_count,
            row.residual_sq,
            row.step,
            row.event.as_str()
        );
    }

    let expected = (2.0 - 2.0_f64.sqrt()) / 2.0;
    println!("\nterminated by {}", record.terminated_by.as_str());
    println!("radius     = {:.15}", record.radius);
    println!("reference  = {expected:.15}");
    println!("difference = {:.3e}", (record.radius - expected).abs());
    for (id, v) in record.active.indices.iter().zip(&record.active.values) {
        println!("active: {id} = {v:.15}");
    }
    Ok(())
}
