//! Certify a candidate packing: refine the contact system to high precision,
//! test first-order rigidity, match the radius against reference minimal
//! polynomials and print the polynomial contact system.
//!
//!     cargo run --release --example certify_packing

use spherejam::container::ConstraintSet;
use spherejam::multistart::{run_campaign, CampaignParams};
use spherejam::verify;

fn main() -> spherejam::Result<()> {
    // Find the best known packing of five disks in the unit square.
    let cs = ConstraintSet::cube(5, 2)?;
    let params = CampaignParams {
        restarts: 200,
        master_seed: 99,
        workers: 2,
        ..CampaignParams::default()
    };
    let outcome = run_campaign(&cs, &params)?;
    let best = &outcome.catalog.entries.last().unwrap().record;
    println!("campaign best radius: {:.15}", best.radius);

    // Contacts are constraints within 1e-5 of the radius.
    let graph = verify::contact_graph(&cs, &best.configuration, best.radius, 1e-5);
    println!(
        "contact graph: {} pair contacts, {} wall contacts",
        graph.pair_edges.len(),
        graph.wall_incidences.len()
    );

    // Newton polish of the contact system, keeping the graph fixed.
    let refined = verify::refine(&cs, &best.configuration, &graph)?;
    println!(
        "refined radius: {:.15} (residual {:.2e})",
        refined.radius, refined.residual
    );

    // First-order rigidity: no admissible motion may loosen any contact.
    let verdict = verify::connelly_test(&cs, &refined.configuration, &graph)?;
    println!("fully jammed: {}", verdict.fully_jammed);
    if !verdict.rattlers.is_empty() {
        println!("rattlers: {:?}", verdict.rattlers);
    }

    // The known optimum is an algebraic number; compare against the bundled
    // reference polynomials.
    let tables = verify::builtin_polynomials();
    match verify::match_reference(refined.radius, 5, 2, &tables) {
        Some((label, m)) => println!(
            "matches {} (root {:.15}, gap {:.2e})",
            label, m.nearest_root, m.abs_gap
        ),
        None => println!("no reference polynomial matched"),
    }

    println!("\ncontact system:");
    print!("{}", verify::emit_contact_system(&cs, &refined.configuration, &graph)?);
    Ok(())
}
