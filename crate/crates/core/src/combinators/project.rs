use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::algorithms::ClassicalSecretary;
use crate::error::{invalid, Result};
use crate::harness::{Arrival, CoinSpace, Coins, Decision, OnlineAlgorithm};
use crate::matroid::{contract, delete, loops, MatroidRef};
use crate::ElementSet;

/// Probability of the classical-secretary branch, `e / (e + 1)`.
pub const HEADS_PROBABILITY: f64 = core::f64::consts::E / (core::f64::consts::E + 1.0);

/// An algorithm for `M \ L` whose output is independent in `N = P / x`,
/// where `M = P \ x` and `L` is the set of loops of `N`.
///
/// One coin per run: heads runs a classical secretary over all of
/// `E(M) - L`; tails runs the inner algorithm and keeps only those of its
/// picks that stay independent in `N`.
#[derive(Debug, Clone)]
pub struct ProjectWrap {
    inner: Box<dyn OnlineAlgorithm>,
    classical: ClassicalSecretary,
    /// `N \ L`, relabelled onto `0..|E - L|`.
    output: MatroidRef,
    /// Local element → element of `E(P) - x`.
    domain: Vec<usize>,
    loops: ElementSet,
    heads: bool,
    picks: ElementSet,
    kept: ElementSet,
}

/// Wraps `inner`, bound to `(ambient \ x) \ L`, into an algorithm whose
/// selections are independent in `ambient / x`.
pub fn project_wrap(ambient: MatroidRef, x: usize, inner: Box<dyn OnlineAlgorithm>) -> Result<ProjectWrap> {
    if x >= ambient.ground_size() || ambient.rank(&ElementSet::singleton(x)) == 0 {
        return Err(invalid(format!("projection element {x} is not a non-loop of the ambient matroid")));
    }
    let single = ElementSet::singleton(x);
    let projected = contract(ambient, &single)?;
    let loops = loops(&projected);
    let output = delete(projected.into(), &loops)?;
    let domain = output.parent_elements().to_vec();
    if inner.ground_size() != domain.len() {
        return Err(invalid(format!(
            "inner algorithm is bound to {} elements but (P \\ x) \\ L has {}",
            inner.ground_size(),
            domain.len()
        )));
    }
    Ok(ProjectWrap {
        inner,
        classical: ClassicalSecretary::new(domain.len()),
        output: output.into(),
        domain,
        loops,
        heads: false,
        picks: ElementSet::new(),
        kept: ElementSet::new(),
    })
}

impl ProjectWrap {
    /// `N \ L` on this algorithm's labels.
    pub fn output_matroid(&self) -> &MatroidRef {
        &self.output
    }

    /// Loops of `N`, in the labels of `E(P) - x`.
    pub fn loops(&self) -> &ElementSet {
        &self.loops
    }

    /// Local element → element of `E(P) - x`.
    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn heads(&self) -> bool {
        self.heads
    }

    /// Everything the inner algorithm accepted in the current run (tails).
    pub fn virtual_picks(&self) -> &ElementSet {
        &self.picks
    }

    /// The inner picks actually kept in the current run (tails).
    pub fn kept(&self) -> &ElementSet {
        &self.kept
    }
}

impl OnlineAlgorithm for ProjectWrap {
    fn name(&self) -> String {
        format!("project({})", self.inner.name())
    }

    fn ground_size(&self) -> usize {
        self.domain.len()
    }

    fn coin_space(&self) -> CoinSpace {
        CoinSpace::Finite.join(self.inner.coin_space())
    }

    fn start(&mut self, coins: &mut dyn Coins) -> Result<()> {
        self.heads = coins.bernoulli(HEADS_PROBABILITY);
        self.picks = ElementSet::new();
        self.kept = ElementSet::new();
        if self.heads {
            self.classical.start(coins)
        } else {
            self.inner.start(coins)
        }
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        if self.heads {
            return Decision::from_bool(self.classical.decide(&arrival));
        }
        if !self.inner.offer(arrival).accepted() {
            return Decision::Reject;
        }
        self.picks.insert(arrival.element);
        let next = self.kept.with(arrival.element);
        if self.output.rank(&next) == next.len() {
            self.kept = next;
            Decision::Accept
        } else {
            Decision::Reject
        }
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}
