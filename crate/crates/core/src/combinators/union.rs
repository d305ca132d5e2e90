use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::harness::{Arrival, CoinSpace, Coins, Decision, OnlineAlgorithm};
use crate::ElementSet;

/// Runs one algorithm per block of a partition of `0..n`, routing each
/// arrival to its block's algorithm (relabelled to the block's local ids)
/// and selecting whatever any of them selects.
#[derive(Debug, Clone)]
pub struct DisjointUnion {
    n: usize,
    parts: Vec<Box<dyn OnlineAlgorithm>>,
    route: Vec<(usize, usize)>,
}

pub fn disjoint_union(n: usize, parts: Vec<(ElementSet, Box<dyn OnlineAlgorithm>)>) -> Result<DisjointUnion> {
    let mut route = alloc::vec![(usize::MAX, 0); n];
    let mut algs = Vec::with_capacity(parts.len());
    for (i, (block, alg)) in parts.into_iter().enumerate() {
        if alg.ground_size() != block.len() {
            return Err(invalid(format!(
                "block {i} has {} elements but its algorithm is bound to {}",
                block.len(),
                alg.ground_size()
            )));
        }
        for (local, e) in block.iter().enumerate() {
            if e >= n || route[e].0 != usize::MAX {
                return Err(invalid(format!("element {e} is out of range or in two blocks")));
            }
            route[e] = (i, local);
        }
        algs.push(alg);
    }
    if route.iter().any(|r| r.0 == usize::MAX) {
        return Err(invalid("blocks do not cover the ground set"));
    }
    Ok(DisjointUnion { n, parts: algs, route })
}

impl OnlineAlgorithm for DisjointUnion {
    fn name(&self) -> String {
        let names: Vec<String> = self.parts.iter().map(|p| p.name()).collect();
        format!("union({})", names.join(", "))
    }

    fn ground_size(&self) -> usize {
        self.n
    }

    fn coin_space(&self) -> CoinSpace {
        self.parts.iter().fold(CoinSpace::Deterministic, |acc, p| acc.join(p.coin_space()))
    }

    fn start(&mut self, coins: &mut dyn Coins) -> Result<()> {
        self.parts.iter_mut().try_for_each(|p| p.start(coins))
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        let (part, local) = self.route[arrival.element];
        self.parts[part].offer(Arrival { element: local, ..arrival })
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}
