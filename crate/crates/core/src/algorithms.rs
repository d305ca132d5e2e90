//! Standalone secretary algorithms used directly and as composition leaves.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::harness::{Arrival, CoinSpace, Coins, Decision, Key, OnlineAlgorithm};
use crate::matroid::{
    enumerate_bases_with_cap, is_paving, sample_random_basis, Matroid, MatroidRef, DEFAULT_BASIS_ATTEMPTS,
};
use crate::numeric::secretary_sample;
use crate::ElementSet;

/// Dynkin's rule: reject the first `sample` arrivals, then accept the first
/// arrival strictly better than all of them.
#[derive(Debug, Clone)]
pub struct ClassicalSecretary {
    n: usize,
    sample: usize,
    seen: usize,
    best: Option<Key>,
    hired: bool,
}

impl ClassicalSecretary {
    /// Sample size `⌊n/e⌋`.
    pub fn new(n: usize) -> Self {
        ClassicalSecretary { n, sample: secretary_sample(n), seen: 0, best: None, hired: false }
    }

    pub fn with_sample(n: usize, sample: usize) -> Result<Self> {
        if sample >= n.max(1) {
            return Err(invalid(format!("classical secretary sample {sample} must be below n = {n}")));
        }
        Ok(ClassicalSecretary { sample, ..Self::new(n) })
    }

    pub fn sample(&self) -> usize {
        self.sample
    }

    fn reset(&mut self) {
        self.seen = 0;
        self.best = None;
        self.hired = false;
    }

    pub(crate) fn decide(&mut self, arrival: &Arrival) -> bool {
        self.seen += 1;
        let key = arrival.key();
        if self.seen <= self.sample {
            self.best = self.best.max(Some(key));
            return false;
        }
        if !self.hired && self.best.is_none_or(|b| key > b) {
            self.hired = true;
            return true;
        }
        false
    }
}

impl OnlineAlgorithm for ClassicalSecretary {
    fn name(&self) -> String {
        format!("classical[{}]", self.sample)
    }

    fn ground_size(&self) -> usize {
        self.n
    }

    fn coin_space(&self) -> CoinSpace {
        CoinSpace::Deterministic
    }

    fn start(&mut self, _coins: &mut dyn Coins) -> Result<()> {
        self.reset();
        Ok(())
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        Decision::from_bool(self.decide(&arrival))
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

/// Ground sets up to this size make [`RandomBasis`] draw from the enumerated
/// basis list, which gives it a finite coin space.
pub const RANDOM_BASIS_ENUMERATION_LIMIT: usize = 12;

/// RB: select exactly the elements of a uniformly random basis, ignoring
/// weights.
#[derive(Debug, Clone)]
pub struct RandomBasis {
    matroid: MatroidRef,
    bases: Option<Vec<ElementSet>>,
    attempts: usize,
    chosen: ElementSet,
}

impl RandomBasis {
    pub fn new(matroid: MatroidRef) -> Result<Self> {
        let bases = if matroid.ground_size() <= RANDOM_BASIS_ENUMERATION_LIMIT {
            Some(enumerate_bases_with_cap(matroid.as_ref(), RANDOM_BASIS_ENUMERATION_LIMIT)?)
        } else {
            None
        };
        Ok(RandomBasis { matroid, bases, attempts: DEFAULT_BASIS_ATTEMPTS, chosen: ElementSet::new() })
    }

    /// Always sample by rejection, even on small ground sets.
    pub fn by_rejection(matroid: MatroidRef, attempts: usize) -> Self {
        RandomBasis { matroid, bases: None, attempts, chosen: ElementSet::new() }
    }

    pub fn chosen(&self) -> &ElementSet {
        &self.chosen
    }
}

impl OnlineAlgorithm for RandomBasis {
    fn name(&self) -> String {
        "rb".to_string()
    }

    fn ground_size(&self) -> usize {
        self.matroid.ground_size()
    }

    fn coin_space(&self) -> CoinSpace {
        if self.bases.is_some() {
            CoinSpace::Finite
        } else {
            CoinSpace::Unbounded
        }
    }

    fn start(&mut self, coins: &mut dyn Coins) -> Result<()> {
        self.chosen = match &self.bases {
            Some(list) => list[coins.index(list.len())].clone(),
            None => sample_random_basis(self.matroid.as_ref(), coins, self.attempts)?,
        };
        Ok(())
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        Decision::from_bool(self.chosen.contains(arrival.element))
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

/// What one recursion level of [`Uni`] does with its arrivals.
#[derive(Debug, Clone, Copy, PartialEq)]
enum LevelRule {
    AcceptAll,
    Classical,
}

/// Kleinberg's multiple-choice secretary algorithm for `U_{r,n}`.
///
/// Level 0 covers all `n` arrivals with capacity `r`. While the capacity is
/// above 1 and below the level's arrival count, the level splits off a
/// prefix of `Binomial(m, 1/2)` arrivals that is handled recursively with
/// capacity `⌊r/2⌋`. After its prefix, a level accepts every arrival that
/// beats the `⌊r/2⌋`-th best prefix arrival, until `r` elements are held.
/// The innermost level runs the classical rule (capacity 1) or accepts
/// everything (capacity at least its length).
#[derive(Debug, Clone)]
pub struct Uni {
    rank: usize,
    n: usize,
    /// `lengths[i]` arrivals are covered by level `i`; decreasing.
    lengths: Vec<usize>,
    caps: Vec<usize>,
    deepest: LevelRule,
    classical: ClassicalSecretary,
    seen: Vec<Key>,
    thresholds: Vec<Option<Key>>,
    accepted: usize,
}

impl Uni {
    pub fn new(rank: usize, n: usize) -> Result<Self> {
        if rank == 0 || rank > n {
            return Err(invalid(format!("UNI needs 1 <= r <= n, got r={rank}, n={n}")));
        }
        Ok(Uni {
            rank,
            n,
            lengths: Vec::new(),
            caps: Vec::new(),
            deepest: LevelRule::AcceptAll,
            classical: ClassicalSecretary::new(0),
            seen: Vec::new(),
            thresholds: Vec::new(),
            accepted: 0,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn binomial_half(m: usize, coins: &mut dyn Coins) -> usize {
        let mut count = 0;
        let mut left = m;
        while left > 0 {
            let take = left.min(64);
            let bits = coins.fair_bits();
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            count += (bits & mask).count_ones() as usize;
            left -= take;
        }
        count
    }

    /// Level index that owns arrival position `t` (0-based).
    fn level_of(&self, t: usize) -> usize {
        let mut level = 0;
        while level + 1 < self.lengths.len() && t < self.lengths[level + 1] {
            level += 1;
        }
        level
    }
}

impl OnlineAlgorithm for Uni {
    fn name(&self) -> String {
        format!("uni[{}]", self.rank)
    }

    fn ground_size(&self) -> usize {
        self.n
    }

    fn coin_space(&self) -> CoinSpace {
        CoinSpace::Unbounded
    }

    fn start(&mut self, coins: &mut dyn Coins) -> Result<()> {
        self.lengths.clear();
        self.caps.clear();
        let (mut m, mut cap) = (self.n, self.rank);
        loop {
            self.lengths.push(m);
            self.caps.push(cap);
            if cap >= m {
                self.deepest = LevelRule::AcceptAll;
                break;
            }
            if cap == 1 {
                self.deepest = LevelRule::Classical;
                break;
            }
            m = Self::binomial_half(m, coins);
            cap /= 2;
        }
        let depth = self.lengths.len();
        self.classical = ClassicalSecretary::new(self.lengths[depth - 1]);
        self.seen.clear();
        self.thresholds = alloc::vec![None; depth];
        self.accepted = 0;
        Ok(())
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        let t = self.seen.len();
        let key = arrival.key();
        let level = self.level_of(t);
        let deepest = self.lengths.len() - 1;
        let accept = if level == deepest {
            match self.deepest {
                LevelRule::AcceptAll => true,
                _ => self.classical.decide(&arrival),
            }
        } else {
            if t == self.lengths[level + 1] {
                // First arrival after this level's prefix: fix its threshold.
                let want = self.caps[level + 1];
                let mut prefix = self.seen.clone();
                prefix.sort_unstable_by(|a, b| b.cmp(a));
                self.thresholds[level] = prefix.get(want - 1).copied();
            }
            self.accepted < self.caps[level] && self.thresholds[level].is_none_or(|th| key > th)
        };
        self.seen.push(key);
        if accept {
            self.accepted += 1;
        }
        Decision::from_bool(accept)
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

/// Paving matroids up to this size are checked by [`Pav::new`]; larger ones
/// are trusted.
pub const PAV_VERIFY_LIMIT: usize = 16;

/// PAV: run UNI with rank `r - 1` on the truncation `T(M)`, which is uniform
/// when `M` is paving.
#[derive(Debug, Clone)]
pub struct Pav {
    uni: Uni,
}

impl Pav {
    pub fn new(matroid: &dyn Matroid) -> Result<Self> {
        if matroid.ground_size() <= PAV_VERIFY_LIMIT && !is_paving(matroid)? {
            return Err(invalid("PAV requires a paving matroid"));
        }
        Self::trusted(matroid.full_rank(), matroid.ground_size())
    }

    /// PAV for a rank-`r` paving matroid on `n` elements, without checking.
    pub fn trusted(rank: usize, n: usize) -> Result<Self> {
        if rank < 2 {
            return Err(invalid(format!("PAV needs rank >= 2, got {rank}")));
        }
        Ok(Pav { uni: Uni::new(rank - 1, n)? })
    }
}

impl OnlineAlgorithm for Pav {
    fn name(&self) -> String {
        "pav".to_string()
    }

    fn ground_size(&self) -> usize {
        self.uni.ground_size()
    }

    fn coin_space(&self) -> CoinSpace {
        self.uni.coin_space()
    }

    fn start(&mut self, coins: &mut dyn Coins) -> Result<()> {
        self.uni.start(coins)
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        self.uni.offer(arrival)
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

/// Sample-then-greedy baseline: observe the first `⌊ρn⌋` arrivals, then
/// accept any later arrival that beats all of them and keeps the selection
/// independent. With an empty sample every arrival passes the threshold.
#[derive(Debug, Clone)]
pub struct ThresholdGreedy {
    matroid: MatroidRef,
    rho: f64,
    sample: usize,
    seen: usize,
    threshold: Option<Key>,
    held: ElementSet,
}

impl ThresholdGreedy {
    pub fn new(matroid: MatroidRef, rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(invalid(format!("sample fraction {rho} must lie in [0, 1)")));
        }
        let sample = libm::floor(rho * matroid.ground_size() as f64) as usize;
        Ok(ThresholdGreedy { matroid, rho, sample, seen: 0, threshold: None, held: ElementSet::new() })
    }

    pub fn sample(&self) -> usize {
        self.sample
    }
}

impl OnlineAlgorithm for ThresholdGreedy {
    fn name(&self) -> String {
        format!("tgreedy[{}]", self.rho)
    }

    fn ground_size(&self) -> usize {
        self.matroid.ground_size()
    }

    fn coin_space(&self) -> CoinSpace {
        CoinSpace::Deterministic
    }

    fn start(&mut self, _coins: &mut dyn Coins) -> Result<()> {
        self.seen = 0;
        self.threshold = None;
        self.held = ElementSet::new();
        Ok(())
    }

    fn offer(&mut self, arrival: Arrival) -> Decision {
        self.seen += 1;
        let key = arrival.key();
        if self.seen <= self.sample {
            self.threshold = self.threshold.max(Some(key));
            return Decision::Reject;
        }
        if self.threshold.is_some_and(|th| key <= th) {
            return Decision::Reject;
        }
        let next = self.held.with(arrival.element);
        if self.matroid.rank(&next) == next.len() {
            self.held = next;
            Decision::Accept
        } else {
            Decision::Reject
        }
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

/// Rejects everything; stands in for parts that may never be selected.
#[derive(Debug, Clone)]
pub struct RejectAll {
    n: usize,
}

impl RejectAll {
    pub fn new(n: usize) -> Self {
        RejectAll { n }
    }
}

impl OnlineAlgorithm for RejectAll {
    fn name(&self) -> String {
        "reject".to_string()
    }

    fn ground_size(&self) -> usize {
        self.n
    }

    fn coin_space(&self) -> CoinSpace {
        CoinSpace::Deterministic
    }

    fn start(&mut self, _coins: &mut dyn Coins) -> Result<()> {
        Ok(())
    }

    fn offer(&mut self, _arrival: Arrival) -> Decision {
        Decision::Reject
    }

    fn boxed_clone(&self) -> Box<dyn OnlineAlgorithm> {
        Box::new(self.clone())
    }
}

/// Algorithm spec strings: `classical[s]`, `rb`, `uni[r]`, `pav`,
/// `tgreedy[rho]`. Brackets are optional where a default exists.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmSpec {
    Classical { sample: Option<usize> },
    RandomBasis,
    Uni { rank: Option<usize> },
    Pav,
    ThresholdGreedy { rho: f64 },
}

impl AlgorithmSpec {
    /// Instantiates the algorithm for `matroid`. `uni` without a rank uses
    /// `r(M)`; `classical` without a sample uses `⌊n/e⌋`.
    pub fn build(&self, matroid: &MatroidRef) -> Result<Box<dyn OnlineAlgorithm>> {
        let n = matroid.ground_size();
        Ok(match self {
            AlgorithmSpec::Classical { sample: None } => Box::new(ClassicalSecretary::new(n)),
            AlgorithmSpec::Classical { sample: Some(s) } => Box::new(ClassicalSecretary::with_sample(n, *s)?),
            AlgorithmSpec::RandomBasis => Box::new(RandomBasis::new(matroid.clone())?),
            AlgorithmSpec::Uni { rank } => Box::new(Uni::new(rank.unwrap_or_else(|| matroid.full_rank()), n)?),
            AlgorithmSpec::Pav => Box::new(Pav::new(matroid.as_ref())?),
            AlgorithmSpec::ThresholdGreedy { rho } => Box::new(ThresholdGreedy::new(matroid.clone(), *rho)?),
        })
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.find('[') {
            Some(i) if s.ends_with(']') => (&s[..i], Some(s[i + 1..s.len() - 1].trim())),
            Some(_) => return Err(invalid(format!("malformed algorithm spec {s:?}"))),
            None => (s, None),
        };
        let bad_arg = |a: &str| invalid(format!("bad parameter {a:?} in algorithm spec {s:?}"));
        let no_arg = |spec: AlgorithmSpec| match arg {
            None => Ok(spec),
            Some(a) => Err(bad_arg(a)),
        };
        match head {
            "classical" => match arg {
                None => Ok(AlgorithmSpec::Classical { sample: None }),
                Some(a) => Ok(AlgorithmSpec::Classical { sample: Some(a.parse().map_err(|_| bad_arg(a))?) }),
            },
            "rb" => no_arg(AlgorithmSpec::RandomBasis),
            "uni" => match arg {
                None => Ok(AlgorithmSpec::Uni { rank: None }),
                Some(a) => Ok(AlgorithmSpec::Uni { rank: Some(a.parse().map_err(|_| bad_arg(a))?) }),
            },
            "pav" => no_arg(AlgorithmSpec::Pav),
            "tgreedy" => {
                let rho = match arg {
                    None => 1.0 / core::f64::consts::E,
                    Some(a) => a.parse().map_err(|_| bad_arg(a))?,
                };
                Ok(AlgorithmSpec::ThresholdGreedy { rho })
            }
            other => Err(invalid(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmSpec::Classical { sample: None } => write!(f, "classical"),
            AlgorithmSpec::Classical { sample: Some(s) } => write!(f, "classical[{s}]"),
            AlgorithmSpec::RandomBasis => write!(f, "rb"),
            AlgorithmSpec::Uni { rank: None } => write!(f, "uni"),
            AlgorithmSpec::Uni { rank: Some(r) } => write!(f, "uni[{r}]"),
            AlgorithmSpec::Pav => write!(f, "pav"),
            AlgorithmSpec::ThresholdGreedy { rho } => write!(f, "tgreedy[{rho}]"),
        }
    }
}
