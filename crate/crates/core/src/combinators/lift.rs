use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;

use crate::algorithms::ClassicalSecretary;
use crate::error::{invalid, Result};
use crate::harness::{Arrival, CoinSpace, Coins, Decision, OnlineAlgorithm};
use crate::matroid::{contract, delete, parallel_class, Matroid, MatroidRef};
use crate::ElementSet;

/// An algorithm for the lift `N = L \ x` built from one for `M = L / x`.
///
/// Elements parallel to `x` in `L` go to a classical secretary instance;
/// everything else is decided by the inner algorithm. Parallel elements
/// are still shown to the inner algorithm (they are loops of `M`) so that
/// it sees its whole ground set, but its answers on them are ignored.
#[derive(Debug, Clone)]
pub struct LiftWrap {
    inner: Box<dyn OnlineAlgorithm>,
    classical: ClassicalSecretary,
    /// `P - {x}` in the labels of `N`.
    parallel: ElementSet,
    target: MatroidRef,
    parallel_picks: usize,
}

/// Wraps `inner`, bound to `ambient / x`, into an algorithm for `ambient \ x`.
pub fn lift_wrap(ambient: MatroidRef, x: usize, inner: Box<dyn OnlineAlgorithm>) -> Result<LiftWrap> {
    let class = parallel_class(ambient.as_ref(), x)?;
    let single = ElementSet::singleton(x);
    let target = delete(ambient.clone(), &single)?;
    let source = contract(ambient, &single)?;
    if inner.ground_size() != source.ground_size() {
        return Err(invalid(format!(
            "inner algorithm is bound to {} elements but L / x has {}",
            inner.ground_size(),
            source.ground_size()
        )));
    }
    let parallel: ElementSet = class.without(x).iter().map(|e| target.local_index(e).expect("e != x")).collect();
    Ok(LiftWrap {
        inner,
        classical: ClassicalSecretary::new(parallel.len()),
        parallel,
        target: target.into(),
        parallel_picks: 0,
    })
}

impl LiftWrap {
    /// `L \ x`, the matroid this algorithm is bound to.
    pub fn target(&self) -> &MatroidRef {
        &self.target
    }

    /// `P - {x}` in local labels.
    pub fn parallel(&self) -> &ElementSet {
        &self.parallel
    }

    /// Parallel elements accepted in the current run.
    pub fn parallel_picks(&self) -> usize {
        self.parallel_picks
    }
}

impl OnlineAlgorithm for LiftWrap {
    fn name(&self) -> String {
        format!("lift({})", self.inner.name())
    }

    fn ground_size(&self) -> usize {
        self.target.ground_size()
    }

    fn coin_space(&self) -> CoinSpace {
        self.inner.coin_space()
    }

    fn start(&mut self, coins: &mut dyn Coins) -> Result<()> {
        self.classical.start(coins)?;
        self.parallel_picks = 0;
        self.inner.start(coins)
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        let inner = self.inner.offer(arrival);
        if self.parallel.contains(arrival.element) {
            let pick = self.classical.decide(&arrival);
            self.parallel_picks += pick as usize;
            Decision::from_bool(pick)
        } else {
            inner
        }
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}
