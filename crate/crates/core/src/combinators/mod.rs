//! Algorithm transformations: restriction, lift, projection, perturbation
//! chains, multi-projection and tree composition.
//!
//! Each wrapper is itself an [`OnlineAlgorithm`](crate::harness::OnlineAlgorithm)
//! bound to its target matroid's ground set, so wrappers nest freely.

mod lift;
mod perturb;
mod project;
mod restrict;
mod tree;
mod union;

pub use lift::{lift_wrap, LiftWrap};
pub use perturb::{multi_project_wrap, perturb_wrap, MultiProjectWrap, PerturbWrap};
pub use project::{project_wrap, ProjectWrap, HEADS_PROBABILITY};
pub use restrict::{restrict_wrap, RestrictWrap};
pub use tree::{regular_compose, tree_compose, CompositionPlan, LeafFactory, PartLabel, PeelRecord, RootRecord};
pub use union::{disjoint_union, DisjointUnion};

/// `e + 1`, the per-projection loss factor.
pub const PROJECTION_FACTOR: f64 = core::f64::consts::E + 1.0;

/// `max(e, 2c)`.
pub fn lift_bound(c: f64) -> f64 {
    core::f64::consts::E.max(2.0 * c)
}

/// `(e + 1)^t c`.
pub fn projection_bound(c: f64, t: usize) -> f64 {
    c * libm::pow(PROJECTION_FACTOR, t as f64)
}
