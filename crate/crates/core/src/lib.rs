//! Matroid computation kernel and online matroid-secretary algorithms.
//!
//! Everything here is pure computation over immutable rank oracles and runs
//! without `std` (an allocator is required). File formats, the command-line
//! driver and parallel evaluation live in the companion `msl` crate.
//!
//! Elements are identified internally by `0..n`. User-facing formats in `msl`
//! shift these to `1..=n`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algorithms;
pub mod combinators;
pub mod connectivity;
mod error;
pub mod fixtures;
pub mod harness;
pub mod ledger;
pub mod matroid;
mod numeric;
mod set;
mod weights;

pub use error::{Error, Result};
pub use numeric::Ratio;
pub use set::ElementSet;
pub use weights::Weighting;

pub use matroid::{Matroid, MatroidRef};
