//! Jammed packings of equal spheres in compact convex containers.
//!
//! A packing of n spheres in a container is encoded by its centers; the
//! largest common radius the centers admit is the minimum over pair
//! half-distances and wall clearances. This crate maximizes that nonsmooth
//! function with an active-set least-squares ascent, runs randomized
//! multistart campaigns that deduplicate the maxima found, and certifies
//! candidates by Gauss-Newton refinement of the contact system, a
//! first-order rigidity test, and matching against reference minimal
//! polynomials.
//!
//! Start with [`container::ConstraintSet`], [`optimizer::maximize`] and
//! [`multistart::run_campaign`]; the `examples/` directory walks through
//! every capability end to end.

pub mod assignment;
pub mod container;
pub mod docs;
pub mod envelope;
pub mod error;
pub mod multistart;
pub mod optimizer;
pub mod render;
pub mod simplex;
pub mod verify;

pub use container::{Configuration, ConstraintId, ConstraintSet, Container, ContainerKind, Wall};
pub use error::{Error, Result};
pub use optimizer::{maximize, LocalMaximumRecord, OptimizerParams};
pub use multistart::{run_campaign, CampaignParams, Catalog};

/// Bundled benchmark starting configurations, in the plain text
/// configuration format.
pub mod fixtures {
    pub const SEVEN_DISKS_SQUARE: &str =
        include_str!("../fixtures/bench_seven_disks_square.txt");
    pub const FIVE_SPHERES_CUBE: &str =
        include_str!("../fixtures/bench_five_spheres_cube.txt");
    pub const FIVE_DISKS_TRIANGLE: &str =
        include_str!("../fixtures/bench_five_disks_triangle.txt");
}
