//! Exhaustive subset scans for small ground sets.

use alloc::vec::Vec;

use super::{simplify, Matroid, MatroidRef};
use crate::error::{Error, Result};
use crate::{ElementSet, Ratio};

/// Largest ground set the exhaustive routines accept by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap || n >= 64 {
        return Err(Error::EnumerationCap { size: n, cap });
    }
    Ok(())
}

/// Calls `f` on every `k`-subset of `0..n` as a bitmask (Gosper's hack).
fn for_each_k_subset(n: usize, k: usize, mut f: impl FnMut(u64)) {
    if k > n {
        return;
    }
    if k == 0 {
        f(0);
        return;
    }
    let limit = 1u64 << n;
    let mut mask = (1u64 << k) - 1;
    while mask < limit {
        f(mask);
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
}

pub fn enumerate_bases(m: &dyn Matroid) -> Result<Vec<ElementSet>> {
    enumerate_bases_with_cap(m, DEFAULT_ENUMERATION_CAP)
}

/// All `X` with `|X| = r(X) = r(M)`, in increasing bitmask order.
pub fn enumerate_bases_with_cap(m: &dyn Matroid, cap: usize) -> Result<Vec<ElementSet>> {
    let n = m.ground_size();
    check_cap(n, cap)?;
    let r = m.full_rank();
    let mut out = Vec::new();
    for_each_k_subset(n, r, |mask| {
        let set = ElementSet::from_mask(mask);
        if m.rank(&set) == r {
            out.push(set);
        }
    });
    Ok(out)
}

pub fn count_bases(m: &dyn Matroid) -> Result<usize> {
    Ok(enumerate_bases(m)?.len())
}

pub fn enumerate_circuits(m: &dyn Matroid) -> Result<Vec<ElementSet>> {
    enumerate_circuits_with_cap(m, DEFAULT_ENUMERATION_CAP)
}

/// All minimal dependent sets, ordered by size then bitmask.
pub fn enumerate_circuits_with_cap(m: &dyn Matroid, cap: usize) -> Result<Vec<ElementSet>> {
    let n = m.ground_size();
    check_cap(n, cap)?;
    let r = m.full_rank();
    let mut out = Vec::new();
    for k in 1..=(r + 1).min(n) {
        for_each_k_subset(n, k, |mask| {
            let set = ElementSet::from_mask(mask);
            if m.rank(&set) + 1 == k && set.iter().all(|e| m.rank(&set.without(e)) + 1 == k) {
                out.push(set);
            }
        });
    }
    Ok(out)
}

/// Whether every circuit has at least `r(M)` elements.
pub fn is_paving(m: &dyn Matroid) -> Result<bool> {
    let r = m.full_rank();
    Ok(enumerate_circuits(m)?.iter().all(|c| c.len() >= r))
}

/// `max |X| / r(X)` over subsets `X` of `si(M)` of positive rank; zero if
/// `M` has only loops.
pub fn density(m: MatroidRef) -> Result<Ratio> {
    let si = simplify(m).matroid;
    let n = si.ground_size();
    check_cap(n, DEFAULT_ENUMERATION_CAP)?;
    let mut best = Ratio::zero();
    for mask in 1u64..(1u64 << n) {
        let set = ElementSet::from_mask(mask);
        let r = si.rank(&set);
        if r > 0 {
            best = best.max(Ratio::new(set.len() as u64, r as u64));
        }
    }
    Ok(best)
}

/// Whether two oracles on the same ground size agree on every subset.
pub fn rank_functions_equal(a: &dyn Matroid, b: &dyn Matroid) -> Result<bool> {
    let n = a.ground_size();
    if b.ground_size() != n {
        return Ok(false);
    }
    check_cap(n, DEFAULT_ENUMERATION_CAP)?;
    Ok((0u64..(1u64 << n)).all(|mask| {
        let set = ElementSet::from_mask(mask);
        a.rank(&set) == b.rank(&set)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gosper_counts() {
        let mut count = 0;
        for_each_k_subset(6, 3, |m| {
            assert_eq!(m.count_ones(), 3);
            count += 1;
        });
        assert_eq!(count, 20);
        let mut zero = 0;
        for_each_k_subset(4, 0, |_| zero += 1);
        assert_eq!(zero, 1);
        let mut none = 0;
        for_each_k_subset(2, 3, |_| none += 1);
        assert_eq!(none, 0);
    }
}
