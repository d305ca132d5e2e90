use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::{Matroid, SparsePavingMatroid};
use crate::error::{invalid, Error, Result};
use crate::harness::Coins;
use crate::ElementSet;

/// Default number of rejection rounds in [`sample_random_basis`].
pub const DEFAULT_BASIS_ATTEMPTS: usize = 100_000;

/// A uniformly random `k`-subset of `0..n` (partial Fisher–Yates).
pub(crate) fn random_subset(n: usize, k: usize, coins: &mut dyn Coins) -> ElementSet {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + coins.index(n - i);
        pool.swap(i, j);
    }
    pool[..k].iter().copied().collect()
}

/// A uniformly random basis by rejection: draw uniform `r`-sets until one is
/// independent. Exhausting `attempts` is an error, never a biased answer.
pub fn sample_random_basis(m: &dyn Matroid, coins: &mut dyn Coins, attempts: usize) -> Result<ElementSet> {
    let n = m.ground_size();
    let r = m.full_rank();
    for _ in 0..attempts {
        let candidate = random_subset(n, r, coins);
        if m.rank(&candidate) == r {
            return Ok(candidate);
        }
    }
    Err(Error::ResourceExhausted(format!("no basis found in {attempts} rejection rounds")))
}

/// Output of [`sample_sparse_paving`].
#[derive(Debug, Clone)]
pub struct SparsePavingSample {
    pub matroid: SparsePavingMatroid,
    pub requested: usize,
    /// False when the attempt cap ran out before `requested` hyperplanes
    /// were kept.
    pub complete: bool,
}

/// Greedy random sparse paving matroid: draw uniform `r`-sets and keep each
/// one that meets every kept set in at most `r - 2` elements, until `count`
/// are kept or `attempts` draws have been made.
pub fn sample_sparse_paving(
    n: usize,
    r: usize,
    count: usize,
    coins: &mut dyn Coins,
    attempts: usize,
) -> Result<SparsePavingSample> {
    if r < 2 || r > n {
        return Err(invalid(format!("sparse paving sampler needs 2 <= r <= n, got r={r}, n={n}")));
    }
    let mut kept: Vec<ElementSet> = Vec::new();
    let mut tries = 0;
    while kept.len() < count && tries < attempts {
        tries += 1;
        let candidate = random_subset(n, r, coins);
        if kept.iter().all(|h| h.intersection(&candidate).len() + 2 <= r) {
            kept.push(candidate);
        }
    }
    let complete = kept.len() == count;
    let set: BTreeSet<ElementSet> = kept.into_iter().collect();
    Ok(SparsePavingSample { matroid: SparsePavingMatroid::from_validated(r, n, set), requested: count, complete })
}
