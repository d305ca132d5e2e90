//! Online simulation semantics and competitive-ratio evaluation.
//!
//! An [`OnlineAlgorithm`] is bound to a matroid at construction, reset with
//! fresh randomness by [`OnlineAlgorithm::start`], and then offered each
//! element exactly once. The harness never revisits an element, so decisions
//! are irrevocable by construction; it also checks every acceptance against
//! the target matroid and force-rejects (or, in strict mode, fails on)
//! anything that would create a dependency.
//!
//! Weight ties are broken by per-stream priorities: "strictly better" always
//! means larger `(weight, priority)` in lexicographic order.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::matroid::{max_weight_basis, Matroid};
use crate::{ElementSet, Weighting};

/// Source of the randomness an algorithm consumes in [`OnlineAlgorithm::start`].
pub trait Coins {
    /// Uniform draw from `0..n` (`n >= 1`).
    fn index(&mut self, n: usize) -> usize;
    /// `true` with probability `p`.
    fn bernoulli(&mut self, p: f64) -> bool;
    /// 64 independent fair bits. Not available under exact enumeration.
    fn fair_bits(&mut self) -> u64;
}

/// [`Coins`] backed by a random number generator.
#[derive(Debug, Clone)]
pub struct RngCoins<R>(pub R);

impl<R: RngCore> Coins for RngCoins<R> {
    fn index(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        self.0.gen_bool(p.clamp(0.0, 1.0))
    }

    fn fair_bits(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// How much randomness an algorithm needs, for exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CoinSpace {
    Deterministic,
    /// Only [`Coins::index`] and [`Coins::bernoulli`] draws, finitely many.
    Finite,
    Unbounded,
}

impl CoinSpace {
    pub fn join(self, other: CoinSpace) -> CoinSpace {
        self.max(other)
    }
}

/// Priority given to stream elements; wrappers that inject virtual elements
/// use priorities below this so that real elements win weight ties.
pub const STREAM_PRIORITY_BASE: u64 = 1 << 32;

/// One element as it is presented to an algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub element: usize,
    pub weight: f64,
    pub priority: u64,
}

impl Arrival {
    pub fn key(&self) -> Key {
        Key { weight: self.weight, priority: self.priority }
    }

    /// Strictly better in `(weight, priority)` order.
    pub fn beats(&self, other: &Arrival) -> bool {
        self.key() > other.key()
    }
}

/// Total order on arrivals used for every "better than" comparison.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub weight: f64,
    pub priority: u64,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight.total_cmp(&other.weight).then(self.priority.cmp(&other.priority))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    pub fn accepted(self) -> bool {
        self == Decision::Accept
    }

    pub fn from_bool(accept: bool) -> Self {
        if accept {
            Decision::Accept
        } else {
            Decision::Reject
        }
    }
}

/// A matroid secretary algorithm bound to a matroid on `0..ground_size()`.
///
/// The algorithm may inspect its matroid freely but learns weights only
/// through [`offer`](Self::offer), one element at a time.
pub trait OnlineAlgorithm: Send + fmt::Debug {
    fn name(&self) -> String;

    fn ground_size(&self) -> usize;

    fn coin_space(&self) -> CoinSpace;

    /// Resets all state and draws this run's randomness.
    fn start(&mut self, coins: &mut dyn Coins) -> Result<()>;

    fn offer(&mut self, arrival: Arrival) -> Decision;

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm>;
}

impl Clone for Box<dyn OnlineAlgorithm> {
    fn clone(&self) -> Self {
        self.boxed_clone()
    }
}

/// An arrival order plus distinct tie-break priorities (indexed by element).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalStream {
    order: Vec<usize>,
    priorities: Vec<u64>,
}

impl ArrivalStream {
    pub fn new(order: Vec<usize>, priorities: Vec<u64>) -> Result<Self> {
        let n = order.len();
        if priorities.len() != n {
            return Err(invalid("priority list length differs from the stream length"));
        }
        let mut seen = alloc::vec![false; n];
        for &e in &order {
            if e >= n || seen[e] {
                return Err(invalid("arrival order is not a permutation of the ground set"));
            }
            seen[e] = true;
        }
        let mut sorted = priorities.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("tie-break priorities are not distinct"));
        }
        Ok(ArrivalStream { order, priorities })
    }

    /// Elements in index order with priorities ranked by index.
    pub fn identity(n: usize) -> Self {
        ArrivalStream { order: (0..n).collect(), priorities: (0..n as u64).map(|p| STREAM_PRIORITY_BASE + p).collect() }
    }

    /// Uniform random order and uniform random priority ranking.
    pub fn random(n: usize, coins: &mut dyn Coins) -> Self {
        let order = random_permutation(n, coins);
        let ranks = random_permutation(n, coins);
        ArrivalStream { order, priorities: ranks.into_iter().map(|r| STREAM_PRIORITY_BASE + r as u64).collect() }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn arrivals<'a>(&'a self, weights: &'a Weighting) -> impl Iterator<Item = Arrival> + 'a {
        self.order.iter().map(move |&e| Arrival { element: e, weight: weights.get(e), priority: self.priorities[e] })
    }
}

fn random_permutation(n: usize, coins: &mut dyn Coins) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = coins.index(i + 1);
        v.swap(i, j);
    }
    v
}

/// Violation handling in [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    /// Count violations and force-reject the offending element.
    Record,
    /// Fail with [`Error::IndependenceViolation`] on the first violation.
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub accepted: ElementSet,
    pub violations: usize,
}

fn check_binding(alg: &dyn OnlineAlgorithm, m: &dyn Matroid, weights: &Weighting) -> Result<()> {
    let n = m.ground_size();
    if alg.ground_size() != n {
        return Err(invalid(format!(
            "algorithm {} is bound to {} elements but the matroid has {n}",
            alg.name(),
            alg.ground_size()
        )));
    }
    if weights.len() != n {
        return Err(invalid(format!("weighting has {} entries for {n} elements", weights.len())));
    }
    Ok(())
}

/// Runs one online pass of `alg` (already started) over `stream`.
pub fn run_started(
    alg: &mut dyn OnlineAlgorithm,
    m: &dyn Matroid,
    weights: &Weighting,
    stream: &ArrivalStream,
    mode: SimulationMode,
) -> Result<Selection> {
    let mut accepted = ElementSet::new();
    let mut violations = 0;
    for arrival in stream.arrivals(weights) {
        if alg.offer(arrival).accepted() {
            let next = accepted.with(arrival.element);
            if m.rank(&next) == next.len() {
                accepted = next;
            } else {
                if mode == SimulationMode::Strict {
                    return Err(Error::IndependenceViolation { element: arrival.element });
                }
                violations += 1;
            }
        }
    }
    Ok(Selection { accepted, violations })
}

/// Starts `alg` with `coins` and runs it over `stream`.
pub fn simulate(
    alg: &mut dyn OnlineAlgorithm,
    m: &dyn Matroid,
    weights: &Weighting,
    stream: &ArrivalStream,
    coins: &mut dyn Coins,
    mode: SimulationMode,
) -> Result<Selection> {
    check_binding(alg, m, weights)?;
    if stream.len() != m.ground_size() {
        return Err(invalid("arrival stream does not cover the ground set"));
    }
    alg.start(coins)?;
    run_started(alg, m, weights, stream, mode)
}

/// Result of evaluating an algorithm on a weighted matroid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EvalReport {
    pub algorithm: String,
    pub expected_weight: f64,
    pub opt: f64,
    /// `opt / expected_weight`; 1 when both are zero, infinite when only the
    /// expectation is.
    pub ratio: f64,
    /// Standard error of `expected_weight` (Monte Carlo only).
    pub standard_error: Option<f64>,
    /// Monte Carlo trials, or the number of enumerated runs when exact.
    pub trials: u64,
    pub violations: u64,
    pub exact: bool,
}

impl EvalReport {
    /// The one-sided test `E[w] >= opt / c - slack_se * SE`.
    pub fn meets_ratio(&self, c: f64, slack_se: f64) -> bool {
        let se = self.standard_error.unwrap_or(0.0);
        self.expected_weight + slack_se * se + 1e-9 * self.opt.max(1.0) >= self.opt / c
    }
}

pub fn competitive_ratio(opt: f64, expected: f64) -> f64 {
    if expected > 0.0 {
        opt / expected
    } else if opt > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// `opt(M, w)`, via greedy.
pub fn opt(m: &dyn Matroid, weights: &Weighting) -> Result<f64> {
    Ok(weights.of(&max_weight_basis(m, weights)?))
}

/// Largest ground set accepted by [`evaluate_exact`].
pub const EXACT_SIZE_CAP: usize = 8;
/// Bound on `n! * prod(tie class sizes!)` in [`evaluate_exact`].
pub const EXACT_CONFIGURATION_CAP: u64 = 20_000_000;

#[derive(Debug, Clone, Copy)]
struct Branch {
    choice: usize,
    arity: usize,
}

/// Replays a fixed script of coin outcomes and extends it depth-first.
#[derive(Debug, Default)]
struct ScriptedCoins {
    script: Vec<Branch>,
    depth: usize,
    probability: f64,
    unsupported: bool,
}

impl ScriptedCoins {
    fn begin(&mut self) {
        self.depth = 0;
        self.probability = 1.0;
    }

    fn draw(&mut self, arity: usize) -> usize {
        if self.depth < self.script.len() {
            debug_assert_eq!(self.script[self.depth].arity, arity, "coin use is not deterministic");
        } else {
            self.script.push(Branch { choice: 0, arity });
        }
        let choice = self.script[self.depth].choice;
        self.depth += 1;
        choice
    }

    /// Moves to the next unexplored outcome; false when exhausted.
    fn advance(&mut self) -> bool {
        self.script.truncate(self.depth);
        while let Some(last) = self.script.last_mut() {
            if last.choice + 1 < last.arity {
                last.choice += 1;
                return true;
            }
            self.script.pop();
        }
        false
    }
}

impl Coins for ScriptedCoins {
    fn index(&mut self, n: usize) -> usize {
        if n == 1 {
            return 0;
        }
        let c = self.draw(n);
        self.probability /= n as f64;
        c
    }

    fn bernoulli(&mut self, p: f64) -> bool {
        let p = p.clamp(0.0, 1.0);
        if p == 0.0 || p == 1.0 {
            return p == 1.0;
        }
        let c = self.draw(2);
        if c == 0 {
            self.probability *= p;
            true
        } else {
            self.probability *= 1.0 - p;
            false
        }
    }

    fn fair_bits(&mut self) -> u64 {
        self.unsupported = true;
        0
    }
}

/// In-place lexicographic successor; resets to ascending and returns false
/// after the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Exact expected weight: the average over all `n!` arrival orders, all
/// relative priority orders within each class of equal weights, and all
/// coin outcomes weighted by their probabilities.
pub fn evaluate_exact(alg: &mut dyn OnlineAlgorithm, m: &dyn Matroid, weights: &Weighting) -> Result<EvalReport> {
    check_binding(alg, m, weights)?;
    let n = m.ground_size();
    if n > EXACT_SIZE_CAP {
        return Err(Error::EnumerationCap { size: n, cap: EXACT_SIZE_CAP });
    }
    if alg.coin_space() == CoinSpace::Unbounded {
        return Err(Error::Unsupported(format!("{} does not declare a finite coin space", alg.name())));
    }

    // Tie classes in increasing weight order.
    let mut by_weight: Vec<usize> = (0..n).collect();
    by_weight.sort_by(|&a, &b| weights.get(a).total_cmp(&weights.get(b)).then(a.cmp(&b)));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &e in &by_weight {
        match classes.last_mut() {
            Some(c) if weights.get(c[0]).to_bits() == weights.get(e).to_bits() => c.push(e),
            _ => classes.push(alloc::vec![e]),
        }
    }
    let configurations = classes.iter().fold(factorial(n), |acc, c| acc.saturating_mul(factorial(c.len())));
    if configurations > EXACT_CONFIGURATION_CAP {
        return Err(Error::ResourceExhausted(format!(
            "{configurations} order/tie configurations exceed the exact-evaluation cap"
        )));
    }

    let mut class_orders: Vec<Vec<usize>> = classes.iter().map(|c| (0..c.len()).collect()).collect();
    let mut coins = ScriptedCoins::default();
    let mut total = 0.0;
    let mut runs: u64 = 0;
    let mut violations: u64 = 0;
    let tie_configurations = configurations / factorial(n);

    loop {
        let mut priorities = alloc::vec![0u64; n];
        let mut rank = 0u64;
        for (class, order) in classes.iter().zip(&class_orders) {
            for &pos in order {
                priorities[class[pos]] = STREAM_PRIORITY_BASE + rank;
                rank += 1;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        loop {
            let stream = ArrivalStream { order: order.clone(), priorities: priorities.clone() };
            let mut expected = 0.0;
            coins.script.clear();
            loop {
                coins.begin();
                alg.start(&mut coins)?;
                let sel = run_started(alg, m, weights, &stream, SimulationMode::Record)?;
                if coins.unsupported {
                    return Err(Error::Unsupported(format!("{} drew unbounded coins", alg.name())));
                }
                expected += coins.probability * weights.of(&sel.accepted);
                violations += sel.violations as u64;
                runs += 1;
                if !coins.advance() {
                    break;
                }
            }
            total += expected;
            if !next_permutation(&mut order) {
                break;
            }
        }
        // Odometer over the per-class priority orders.
        let mut carried = true;
        for order in class_orders.iter_mut() {
            if next_permutation(order) {
                carried = false;
                break;
            }
        }
        if carried {
            break;
        }
    }

    let expected_weight = total / (factorial(n) * tie_configurations) as f64;
    let opt = opt(m, weights)?;
    Ok(EvalReport {
        algorithm: alg.name(),
        expected_weight,
        opt,
        ratio: competitive_ratio(opt, expected_weight),
        standard_error: None,
        trials: runs,
        violations,
        exact: true,
    })
}

/// Outcome of one Monte Carlo trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub weight: f64,
    pub violations: usize,
}

/// The generator for trial `trial` under `seed`: one ChaCha stream per
/// trial, so results do not depend on how trials are scheduled.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One trial: fresh random order, priorities and coins from `trial_rng`.
pub fn run_trial(
    alg: &mut dyn OnlineAlgorithm,
    m: &dyn Matroid,
    weights: &Weighting,
    seed: u64,
    trial: u64,
    mode: SimulationMode,
) -> Result<TrialOutcome> {
    let mut coins = RngCoins(trial_rng(seed, trial));
    let stream = ArrivalStream::random(m.ground_size(), &mut coins);
    alg.start(&mut coins)?;
    let sel = run_started(alg, m, weights, &stream, mode)?;
    Ok(TrialOutcome { weight: weights.of(&sel.accepted), violations: sel.violations })
}

/// Aggregates trial outcomes (in trial order) into a report.
pub fn summarize(algorithm: String, opt: f64, outcomes: &[TrialOutcome]) -> EvalReport {
    let t = outcomes.len() as f64;
    let mean = outcomes.iter().map(|o| o.weight).sum::<f64>() / t;
    let se = if outcomes.len() > 1 {
        let var = outcomes.iter().map(|o| (o.weight - mean) * (o.weight - mean)).sum::<f64>() / (t - 1.0);
        libm::sqrt(var / t)
    } else {
        0.0
    };
    EvalReport {
        algorithm,
        expected_weight: mean,
        opt,
        ratio: competitive_ratio(opt, mean),
        standard_error: Some(se),
        trials: outcomes.len() as u64,
        violations: outcomes.iter().map(|o| o.violations as u64).sum(),
        exact: false,
    }
}

/// Mean and standard error over `trials` independent trials.
pub fn evaluate_monte_carlo(
    alg: &mut dyn OnlineAlgorithm,
    m: &dyn Matroid,
    weights: &Weighting,
    trials: u64,
    seed: u64,
) -> Result<EvalReport> {
    check_binding(alg, m, weights)?;
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let outcomes =
        (0..trials).map(|t| run_trial(alg, m, weights, seed, t, SimulationMode::Record)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(alg.name(), opt(m, weights)?, &outcomes))
}
