//! Containers beyond the cube: the bundled equilateral triangle and a custom
//! convex polytope given by half-spaces.
//!
//!     cargo run --release --example custom_container

use spherejam::container::{ConstraintSet, Container, Wall};
use spherejam::multistart::{run_campaign, CampaignParams};

fn main() -> spherejam::Result<()> {
    // Four disks in the equilateral triangle of side 2.
    let cs = ConstraintSet::for_container(4, Container::triangle2())?;
    let params = CampaignParams {
        restarts: 150,
        master_seed: 31,
        ..CampaignParams::default()
    };
    let outcome = run_campaign(&cs, &params)?;
    println!("triangle, 4 disks:");
    for e in outcome.catalog.entries.iter().rev() {
        println!("  r = {:.12}  hits = {}", e.record.radius, e.hits);
    }

    // A right triangle assembled from raw half-spaces. Normals must be unit
    // length and point inward; validity (bounded, nonempty interior) is
    // checked on construction.
    let s = 0.5_f64.sqrt();
    let tri = Container::polytope(
        2,
        vec![
            Wall::new(vec![1.0, 0.0], 0.0)?,  // x >= 0
            Wall::new(vec![0.0, 1.0], 0.0)?,  // y >= 0
            Wall::new(vec![-s, -s], -s)?,     // x + y <= 1
        ],
    )?;
    let cs = ConstraintSet::for_container(2, tri)?;
    let outcome = run_campaign(
        &cs,
        &CampaignParams {
            restarts: 100,
            master_seed: 32,
            ..CampaignParams::default()
        },
    )?;
    println!("\nright triangle, 2 disks:");
    for e in outcome.catalog.entries.iter().rev() {
        println!("  r = {:.12}  hits = {}", e.record.radius, e.hits);
    }

    // An unbounded or empty wall system is rejected up front.
    let open = Container::polytope(
        2,
        vec![
            Wall::new(vec![1.0, 0.0], 0.0)?,
            Wall::new(vec![0.0, 1.0], 0.0)?,
        ],
    );
    println!("\nhalf-open quadrant rejected: {}", open.is_err());
    Ok(())
}
