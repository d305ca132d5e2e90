use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::harness::{Arrival, CoinSpace, Coins, Decision, OnlineAlgorithm};
use crate::ElementSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Real,
    /// Ghost element (inner id) and its tie-break priority.
    Ghost(usize, u64),
}

/// An algorithm for `M|R` built from one for `M`: the elements of `E - R`
/// are injected as zero-weight ghosts at uniformly random positions of the
/// inner algorithm's stream, and any ghost it accepts is dropped.
///
/// Ghosts get priorities below every real arrival, so they lose weight ties.
#[derive(Debug, Clone)]
pub struct RestrictWrap {
    inner: Box<dyn OnlineAlgorithm>,
    /// Local element `i` is inner element `keep[i]`.
    keep: Vec<usize>,
    ghosts: Vec<usize>,
    schedule: Vec<Slot>,
    cursor: usize,
}

/// Restricts `inner` (bound to `M`) to the elements of `keep`.
pub fn restrict_wrap(inner: Box<dyn OnlineAlgorithm>, keep: &ElementSet) -> Result<RestrictWrap> {
    let n = inner.ground_size();
    if keep.bound() > n {
        return Err(invalid(format!("restriction set {keep:?} leaves the inner ground set 0..{n}")));
    }
    Ok(RestrictWrap {
        inner,
        keep: keep.to_vec(),
        ghosts: keep.complement(n).to_vec(),
        schedule: Vec::new(),
        cursor: 0,
    })
}

impl RestrictWrap {
    pub fn inner(&self) -> &dyn OnlineAlgorithm {
        self.inner.as_ref()
    }

    fn feed_ghosts(&mut self) {
        while let Some(&Slot::Ghost(g, priority)) = self.schedule.get(self.cursor) {
            self.inner.offer(Arrival { element: g, weight: 0.0, priority });
            self.cursor += 1;
        }
    }
}

impl OnlineAlgorithm for RestrictWrap {
    fn name(&self) -> String {
        format!("restrict({})", self.inner.name())
    }

    fn ground_size(&self) -> usize {
        self.keep.len()
    }

    fn coin_space(&self) -> CoinSpace {
        let own = if self.ghosts.is_empty() { CoinSpace::Deterministic } else { CoinSpace::Finite };
        own.join(self.inner.coin_space())
    }

    fn start(&mut self, coins: &mut dyn Coins) -> Result<()> {
        let total = self.inner.ground_size();
        let mut order = self.ghosts.clone();
        for i in (1..order.len()).rev() {
            let j = coins.index(i + 1);
            order.swap(i, j);
        }
        self.schedule.clear();
        let mut ghosts_left = order.len();
        let mut next_ghost = 0;
        for slots_left in (1..=total).rev() {
            let ghost = ghosts_left == slots_left
                || (ghosts_left > 0 && coins.bernoulli(ghosts_left as f64 / slots_left as f64));
            if ghost {
                self.schedule.push(Slot::Ghost(order[next_ghost], next_ghost as u64));
                next_ghost += 1;
                ghosts_left -= 1;
            } else {
                self.schedule.push(Slot::Real);
            }
        }
        self.cursor = 0;
        self.inner.start(coins)
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        self.feed_ghosts();
        self.cursor += 1;
        let decision = self.inner.offer(Arrival { element: self.keep[arrival.element], ..arrival });
        self.feed_ghosts();
        decision
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}
