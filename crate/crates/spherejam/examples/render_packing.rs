//! Draw packings: an SVG picture for disks in the plane and a DOT contact
//! graph for spheres in the cube.
//!
//!     cargo run --release --example render_packing

use spherejam::container::{Configuration, ConstraintSet};
use spherejam::optimizer::{maximize, OptimizerParams};
use spherejam::{render, verify};

fn main() -> spherejam::Result<()> {
    // Four disks in the unit square settle into the 2 x 2 grid.
    let cs = ConstraintSet::cube(4, 2)?;
    let x0 = Configuration::new(
        4,
        2,
        vec![0.21, 0.33, 0.68, 0.29, 0.31, 0.72, 0.74, 0.70],
    )?;
    let record = maximize(&cs, &x0, &OptimizerParams::default())?;
    let graph = verify::contact_graph(&cs, &record.configuration, record.radius, 1e-5);
    let svg = render::render_svg(cs.container(), &record.configuration, record.radius, &graph)?;
    std::fs::write("four_disks.svg", &svg)?;
    println!("four disks, r = {:.12}: wrote four_disks.svg", record.radius);

    // For d >= 3 there is no flat picture; emit the contact graph instead.
    let cs3 = ConstraintSet::cube(4, 3)?;
    let x0 = Configuration::parse(spherejam::fixtures::FIVE_SPHERES_CUBE)?;
    // Reuse the first four rows of the bundled five-sphere start.
    let x0 = Configuration::new(4, 3, x0.coords()[..12].to_vec())?;
    let record = maximize(&cs3, &x0, &OptimizerParams::default())?;
    let graph = verify::contact_graph(&cs3, &record.configuration, record.radius, 1e-5);
    let dot = render::render_dot(4, &graph);
    std::fs::write("four_spheres.dot", &dot)?;
    println!(
        "four spheres, r = {:.12}: wrote four_spheres.dot ({} pair contacts)",
        record.radius,
        graph.pair_edges.len()
    );
    Ok(())
}
