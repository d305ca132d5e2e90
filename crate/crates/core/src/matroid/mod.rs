//! Rank oracles, concrete matroid families and derived views.
//!
//! Every matroid is a [`Matroid`] trait object: a ground set `0..n` plus a
//! rank function. Views (dual, minors, truncation, direct sums) are lazy and
//! hold an [`Arc`] to their parent, so oracles are immutable and shareable
//! across evaluation workers.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::{ElementSet, Weighting};

mod enumerate;
mod families;
mod sample;
mod views;

pub use enumerate::{
    count_bases, density, enumerate_bases, enumerate_bases_with_cap, enumerate_circuits, enumerate_circuits_with_cap,
    is_paving, rank_functions_equal, DEFAULT_ENUMERATION_CAP,
};
pub use families::{r10, r10_matrix, GraphicMatroid, LinearMatroid, SparsePavingMatroid, UniformMatroid};
pub use sample::{sample_random_basis, sample_sparse_paving, SparsePavingSample, DEFAULT_BASIS_ATTEMPTS};
pub use views::{
    contract, delete, direct_sum, dual, minor, restrict, simplify, truncate, truncate_to, DirectSum, Dual, Minor,
    Simplification, Truncation,
};

/// A rank oracle on the ground set `0..ground_size()`.
///
/// Implementations must satisfy the rank axioms: `rank(∅) = 0`, monotone,
/// submodular, and `rank(X ∪ {e}) <= rank(X) + 1`. Queries assume the set
/// lies inside the ground set; use [`checked_rank`] at trust boundaries.
pub trait Matroid: fmt::Debug + Send + Sync {
    fn ground_size(&self) -> usize;

    fn rank(&self, set: &ElementSet) -> usize;

    /// `r(M)`.
    fn full_rank(&self) -> usize {
        self.rank(&ElementSet::full(self.ground_size()))
    }

    fn is_independent(&self, set: &ElementSet) -> bool {
        self.rank(set) == set.len()
    }
}

/// Shared handle to a rank oracle.
pub type MatroidRef = Arc<dyn Matroid>;

/// Wraps a concrete matroid into a shared handle.
pub fn share<M: Matroid + 'static>(m: M) -> MatroidRef {
    Arc::new(m)
}

pub(crate) fn check_in_ground(m: &dyn Matroid, set: &ElementSet) -> Result<()> {
    let n = m.ground_size();
    if set.bound() > n {
        return Err(Error::ElementOutOfRange { element: set.bound() - 1, ground_size: n });
    }
    Ok(())
}

/// `r_M(X)` with a range check on `X`.
pub fn checked_rank(m: &dyn Matroid, set: &ElementSet) -> Result<usize> {
    check_in_ground(m, set)?;
    Ok(m.rank(set))
}

/// `cl_M(X) = { e : r(X ∪ e) = r(X) }`.
pub fn closure(m: &dyn Matroid, set: &ElementSet) -> Result<ElementSet> {
    check_in_ground(m, set)?;
    let r = m.rank(set);
    let mut out = set.clone();
    for e in 0..m.ground_size() {
        if !set.contains(e) && m.rank(&set.with(e)) == r {
            out.insert(e);
        }
    }
    Ok(out)
}

/// Elements of rank zero.
pub fn loops(m: &dyn Matroid) -> ElementSet {
    (0..m.ground_size()).filter(|&e| m.rank(&ElementSet::singleton(e)) == 0).collect()
}

/// The parallel class of the non-loop `e`: all non-loops `f` with
/// `r({e, f}) = 1`, including `e` itself.
pub fn parallel_class(m: &dyn Matroid, e: usize) -> Result<ElementSet> {
    if e >= m.ground_size() {
        return Err(Error::ElementOutOfRange { element: e, ground_size: m.ground_size() });
    }
    if m.rank(&ElementSet::singleton(e)) == 0 {
        return Err(invalid(alloc::format!("element {e} is a loop")));
    }
    let single = ElementSet::singleton(e);
    Ok((0..m.ground_size())
        .filter(|&f| m.rank(&ElementSet::singleton(f)) == 1 && m.rank(&single.with(f)) == 1)
        .collect())
}

/// Greedily extends `start` (assumed independent) to a maximal independent
/// subset of `start ∪ candidates`, scanning `candidates` in the given order.
pub fn extend_independent(
    m: &dyn Matroid,
    start: &ElementSet,
    candidates: impl IntoIterator<Item = usize>,
) -> ElementSet {
    let mut current = start.clone();
    for e in candidates {
        if current.contains(e) {
            continue;
        }
        let next = current.with(e);
        if m.rank(&next) == next.len() {
            current = next;
        }
    }
    current
}

/// A maximum-weight basis, by greedy in order of decreasing weight (ties by
/// element index).
pub fn max_weight_basis(m: &dyn Matroid, weights: &Weighting) -> Result<ElementSet> {
    if weights.len() != m.ground_size() {
        return Err(invalid(alloc::format!(
            "weighting has {} entries for a ground set of size {}",
            weights.len(),
            m.ground_size()
        )));
    }
    let mut order: Vec<usize> = (0..m.ground_size()).collect();
    order.sort_by(|&a, &b| weights.get(b).total_cmp(&weights.get(a)).then(a.cmp(&b)));
    Ok(extend_independent(m, &ElementSet::new(), order))
}

/// `opt(M, w)`: the weight of a maximum-weight independent set.
pub fn opt(m: &dyn Matroid, weights: &Weighting) -> Result<f64> {
    Ok(weights.of(&max_weight_basis(m, weights)?))
}
