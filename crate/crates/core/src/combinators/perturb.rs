use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{disjoint_union, lift_wrap, project_wrap, projection_bound, restrict_wrap};
use crate::algorithms::RejectAll;
use crate::connectivity::{Direction, LambdaWitness, PerturbationStep};
use crate::error::{invalid, Error, Result};
use crate::harness::{Arrival, CoinSpace, Coins, Decision, OnlineAlgorithm};
use crate::matroid::{loops, rank_functions_equal, MatroidRef};
use crate::ElementSet;

/// Projection step with the loop bookkeeping: restrict `alg` (bound to all
/// of `E(P) - x`) away from the loops of `P / x`, project, and reject the
/// loops outright.
fn project_full(step: &PerturbationStep, alg: Box<dyn OnlineAlgorithm>) -> Result<Box<dyn OnlineAlgorithm>> {
    let n = step.ambient.ground_size() - 1;
    let target_loops = loops(step.target().as_ref());
    if target_loops.is_empty() {
        return Ok(Box::new(project_wrap(step.ambient.clone(), step.element, alg)?));
    }
    let keep = target_loops.complement(n);
    let restricted = restrict_wrap(alg, &keep)?;
    let projected = project_wrap(step.ambient.clone(), step.element, Box::new(restricted))?;
    let union = disjoint_union(
        n,
        vec![
            (keep, Box::new(projected) as Box<dyn OnlineAlgorithm>),
            (target_loops.clone(), Box::new(RejectAll::new(target_loops.len()))),
        ],
    )?;
    Ok(Box::new(union))
}

/// An algorithm for the last matroid of a lift/projection chain.
#[derive(Debug, Clone)]
pub struct PerturbWrap {
    alg: Box<dyn OnlineAlgorithm>,
    target: MatroidRef,
    steps: usize,
}

/// Folds `lift_wrap` and `project_wrap` along `steps`, starting from `base`
/// bound to `start`. Each step's source must equal the previous matroid
/// (compared as rank functions, so ground sets are limited to the
/// enumeration cap).
pub fn perturb_wrap(
    start: MatroidRef,
    steps: &[PerturbationStep],
    base: Box<dyn OnlineAlgorithm>,
) -> Result<PerturbWrap> {
    if base.ground_size() != start.ground_size() {
        return Err(invalid(format!(
            "base algorithm is bound to {} elements but the start matroid has {}",
            base.ground_size(),
            start.ground_size()
        )));
    }
    let mut current = start;
    let mut alg = base;
    for (index, step) in steps.iter().enumerate() {
        let fail = |reason: String| Error::InvalidPerturbationStep { index, reason };
        if step.ambient.ground_size() != current.ground_size() + 1 {
            return Err(fail(format!(
                "ambient has {} elements, expected {}",
                step.ambient.ground_size(),
                current.ground_size() + 1
            )));
        }
        match rank_functions_equal(step.source().as_ref(), current.as_ref()) {
            Ok(true) => {}
            Ok(false) => return Err(fail("source does not match the previous matroid".to_string())),
            Err(e) => return Err(fail(e.to_string())),
        }
        alg = match step.direction {
            Direction::Lift => Box::new(lift_wrap(step.ambient.clone(), step.element, alg)?),
            Direction::Projection => project_full(step, alg)?,
        };
        current = step.target();
    }
    Ok(PerturbWrap { alg, target: current, steps: steps.len() })
}

impl PerturbWrap {
    /// The final matroid of the chain.
    pub fn target(&self) -> &MatroidRef {
        &self.target
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `(e + 1)^t c`.
    pub fn claimed_ratio(&self, c: f64) -> f64 {
        projection_bound(c, self.steps)
    }
}

/// Iterated projection along a [`LambdaWitness`] chain, from `M|X` towards
/// `M / (E - X)`.
#[derive(Debug, Clone)]
pub struct MultiProjectWrap {
    alg: Box<dyn OnlineAlgorithm>,
    /// `X - L` as positions in `X` (increasing), one per local element.
    domain: ElementSet,
    end: MatroidRef,
    projections: usize,
}

/// Applies `project_wrap` once per element of `I3`. `base` is bound to
/// `M|X` (elements of `X` in increasing order); the result is bound to
/// `X - L`, `L` the loops of `M / (E - X)`, and its selections are
/// independent in `M / (E - X)`.
pub fn multi_project_wrap(witness: &LambdaWitness, base: Box<dyn OnlineAlgorithm>) -> Result<MultiProjectWrap> {
    let s = witness.x.len();
    if base.ground_size() != s {
        return Err(invalid(format!("base algorithm is bound to {} elements but |X| = {s}", base.ground_size())));
    }
    let mut domain = ElementSet::full(s);
    let mut alg = base;
    let chain = witness.projection_chain();
    for step in &chain {
        let next_loops = loops(step.target().as_ref());
        let next_domain = domain.difference(&next_loops);
        if next_domain != domain {
            let positions: Vec<usize> = domain.iter().collect();
            let keep: ElementSet =
                next_domain.iter().map(|e| positions.binary_search(&e).expect("nested domains")).collect();
            alg = Box::new(restrict_wrap(alg, &keep)?);
        }
        alg = Box::new(project_wrap(step.ambient.clone(), step.element, alg)?);
        domain = next_domain;
    }
    Ok(MultiProjectWrap { alg, domain, end: witness.end_matroid(), projections: chain.len() })
}

impl MultiProjectWrap {
    pub fn domain(&self) -> &ElementSet {
        &self.domain
    }

    /// `M / (E - X)` on the labels of `X`.
    pub fn end_matroid(&self) -> &MatroidRef {
        &self.end
    }

    pub fn projections(&self) -> usize {
        self.projections
    }

    /// `c (e + 1)^t`.
    pub fn claimed_ratio(&self, c: f64) -> f64 {
        projection_bound(c, self.projections)
    }
}

macro_rules! delegate {
    ($ty:ident, $label:literal) => {
        impl OnlineAlgorithm for $ty {
            fn name(&self) -> String {
                format!(concat!($label, "({})"), self.alg.name())
            }

            fn ground_size(&self) -> usize {
                self.alg.ground_size()
            }

            fn coin_space(&self) -> CoinSpace {
                self.alg.coin_space()
            }

            fn start(&mut self, coins: &mut dyn Coins) -> Result<()> {
                self.alg.start(coins)
            }

            fn offer(&mut self, arrival: Arrival) -> Decision {
                self.alg.offer(arrival)
            }

            fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
                Box::new(self.clone())
            }
        }
    };
}

delegate!(PerturbWrap, "perturb");
delegate!(MultiProjectWrap, "multiproject");
