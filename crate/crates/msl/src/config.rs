//! Flat `key = value` experiment configs.
//!
//! ```text
//! experiment = rb_sweep
//! seed = 17
//! trials = 10000
//! n = 20, 40, 80
//! out_csv = rb.csv
//! ```
//!
//! Keys: `experiment`, `seed`, `trials`, `n`, `r`, `gamma`, `h`, `instances`,
//! `weights`, `matroid`, `alg`, `leaf`, `exact`, `out_csv`, `out_json`.
//! Relative paths are taken from the config file's directory.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use msl_core::algorithms::AlgorithmSpec;
use msl_core::fixtures::WeightModel;

use crate::{read_file, Error, Result};

/// `√(8 ln 2) + 0.01`: just above the threshold the RB guarantee needs.
pub fn default_gamma() -> f64 {
    (8.0 * std::f64::consts::LN_2).sqrt() + 0.01
}

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_RB_SIZES: [usize; 3] = [20, 40, 80];
pub const DEFAULT_PAV_RANKS: [usize; 3] = [37, 49, 64];
/// Smallest rank the PAV guarantee covers.
pub const PAV_MIN_RANK: usize = 37;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    RbSweep,
    PavSweep,
    Ledger,
    Eval,
    Compose,
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rb_sweep" => Ok(Experiment::RbSweep),
            "pav_sweep" => Ok(Experiment::PavSweep),
            "ledger" => Ok(Experiment::Ledger),
            "eval" => Ok(Experiment::Eval),
            "compose" => Ok(Experiment::Compose),
            _ => Err(format!("unknown experiment {s:?} (rb_sweep, pav_sweep, ledger, eval, compose)")),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::RbSweep => "rb_sweep",
            Experiment::PavSweep => "pav_sweep",
            Experiment::Ledger => "ledger",
            Experiment::Eval => "eval",
            Experiment::Compose => "compose",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: u64,
    /// Ground set sizes for `rb_sweep`; optional partner sizes for `pav_sweep`.
    pub n: Vec<usize>,
    /// Ranks for `pav_sweep`.
    pub r: Vec<usize>,
    pub gamma: f64,
    /// Hyperplane count of sampled sparse paving matroids; `n` when unset.
    pub h: Option<usize>,
    /// Sampled instances per sweep size.
    pub instances: usize,
    pub weights: WeightModel,
    pub matroid: Option<PathBuf>,
    pub alg: Option<AlgorithmSpec>,
    /// Leaf algorithm of `compose` when the decomposition has no part labels.
    pub leaf: AlgorithmSpec,
    pub exact: bool,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
}

impl Config {
    /// A config with every optional key at its default.
    pub fn new(experiment: Experiment, seed: u64) -> Self {
        Config {
            experiment,
            seed,
            trials: DEFAULT_TRIALS,
            n: Vec::new(),
            r: Vec::new(),
            gamma: default_gamma(),
            h: None,
            instances: 1,
            weights: WeightModel::Uniform,
            matroid: None,
            alg: None,
            leaf: AlgorithmSpec::ThresholdGreedy { rho: 1.0 / std::f64::consts::E },
            exact: false,
            out_csv: None,
            out_json: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, &path.display().to_string(), base)
    }

    /// Parses and validates. Syntax problems are [`Error::Parse`]; missing
    /// or out-of-range values are [`Error::Validation`].
    pub fn parse(text: &str, origin: &str, base: &Path) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut experiment = None;
        let mut seed = None;
        let mut c = Config::new(Experiment::Eval, 0);
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::parse(origin, n, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::parse(origin, n, format!("duplicate key {key:?}")));
            }
            let bad = |what: &str| Error::parse(origin, n, format!("{key}: expected {what}, got {value:?}"));
            let path = || base.join(value);
            match key {
                "experiment" => experiment = Some(value.parse::<Experiment>().map_err(|e| Error::parse(origin, n, e))?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad("an unsigned integer"))?),
                "trials" => c.trials = value.parse().map_err(|_| bad("an unsigned integer"))?,
                "n" => c.n = list(value).ok_or_else(|| bad("a list of sizes"))?,
                "r" => c.r = list(value).ok_or_else(|| bad("a list of ranks"))?,
                "gamma" => c.gamma = value.parse().map_err(|_| bad("a number"))?,
                "h" => c.h = Some(value.parse().map_err(|_| bad("an unsigned integer"))?),
                "instances" => c.instances = value.parse().map_err(|_| bad("an unsigned integer"))?,
                "weights" => c.weights = WeightModel::parse(value).ok_or_else(|| bad("uniform or heavy"))?,
                "matroid" => c.matroid = Some(path()),
                "alg" => {
                    c.alg = Some(value.parse().map_err(|e: msl_core::Error| Error::parse(origin, n, e.to_string()))?)
                }
                "leaf" => {
                    c.leaf = value.parse().map_err(|e: msl_core::Error| Error::parse(origin, n, e.to_string()))?
                }
                "exact" => c.exact = value.parse().map_err(|_| bad("true or false"))?,
                "out_csv" => c.out_csv = Some(path()),
                "out_json" => c.out_json = Some(path()),
                _ => return Err(Error::parse(origin, n, format!("unknown key {key:?}"))),
            }
        }
        c.experiment = experiment.ok_or_else(|| Error::Validation(format!("{origin}: experiment is required")))?;
        c.seed = seed.ok_or_else(|| Error::Validation(format!("{origin}: seed is required")))?;
        c.validate()?;
        Ok(c)
    }

    /// Checks the invariants every experiment relies on and the keys the
    /// chosen experiment needs.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(m));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.instances == 0 {
            return fail("instances must be at least 1".into());
        }
        if !self.gamma.is_finite() || self.gamma <= 0.0 {
            return fail(format!("gamma must be positive, got {}", self.gamma));
        }
        match self.experiment {
            Experiment::RbSweep => {
                if let Some(&n) = self.n.iter().find(|&&n| n < 4) {
                    return fail(format!("rb_sweep needs n >= 4, got {n}"));
                }
            }
            Experiment::PavSweep => {
                if let Some(&r) = self.r.iter().find(|&&r| r < PAV_MIN_RANK) {
                    return fail(format!("pav_sweep needs r >= {PAV_MIN_RANK}, got {r}"));
                }
                if !self.n.is_empty() {
                    if self.n.len() != self.pav_ranks().len() {
                        return fail("pav_sweep: n must list one size per rank".into());
                    }
                    if let Some((&r, &n)) = self.pav_ranks().iter().zip(&self.n).find(|(&r, &n)| n <= r) {
                        return fail(format!("pav_sweep needs n > r, got r={r}, n={n}"));
                    }
                }
            }
            Experiment::Eval => {
                if self.matroid.is_none() || self.alg.is_none() {
                    return fail("eval needs matroid and alg".into());
                }
            }
            Experiment::Compose => {
                if self.matroid.is_none() {
                    return fail("compose needs matroid".into());
                }
            }
            Experiment::Ledger => {}
        }
        Ok(())
    }

    pub fn rb_sizes(&self) -> Vec<usize> {
        if self.n.is_empty() {
            DEFAULT_RB_SIZES.to_vec()
        } else {
            self.n.clone()
        }
    }

    pub fn pav_ranks(&self) -> Vec<usize> {
        if self.r.is_empty() {
            DEFAULT_PAV_RANKS.to_vec()
        } else {
            self.r.clone()
        }
    }

    /// `(r, n)` pairs of `pav_sweep`; `n = 2r` unless listed.
    pub fn pav_shapes(&self) -> Vec<(usize, usize)> {
        let ranks = self.pav_ranks();
        if self.n.is_empty() {
            ranks.iter().map(|&r| (r, 2 * r)).collect()
        } else {
            ranks.into_iter().zip(self.n.iter().copied()).collect()
        }
    }
}

fn list(value: &str) -> Option<Vec<usize>> {
    value
        .split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().ok())
        .collect::<Option<Vec<_>>>()
        .filter(|v| !v.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Config> {
        Config::parse(text, "cfg", Path::new("/base"))
    }

    #[test]
    fn full_config() {
        let c = parse(
            "experiment = eval\nseed = 9 # fixed\ntrials = 50\nmatroid = k4.txt\nalg = tgreedy[0.25]\nweights = heavy\nexact = true\nout_csv = out/a.csv\n",
        )
        .unwrap();
        assert_eq!(c.experiment, Experiment::Eval);
        assert_eq!((c.seed, c.trials), (9, 50));
        assert_eq!(c.matroid.as_deref(), Some(Path::new("/base/k4.txt")));
        assert_eq!(c.alg, Some(AlgorithmSpec::ThresholdGreedy { rho: 0.25 }));
        assert_eq!(c.weights, WeightModel::Heavy);
        assert!(c.exact);
        assert_eq!(c.out_csv.as_deref(), Some(Path::new("/base/out/a.csv")));
    }

    #[test]
    fn defaults() {
        let c = parse("experiment = rb_sweep\nseed = 1\n").unwrap();
        assert_eq!(c.trials, DEFAULT_TRIALS);
        assert_eq!(c.rb_sizes(), vec![20, 40, 80]);
        assert!((c.gamma - 2.3648).abs() < 1e-3);
        let p = parse("experiment = pav_sweep\nseed = 1\nr = 49\nn = 100\n").unwrap();
        assert_eq!(p.pav_shapes(), vec![(49, 100)]);
        assert_eq!(
            parse("experiment = pav_sweep\nseed = 1\n").unwrap().pav_shapes(),
            vec![(37, 74), (49, 98), (64, 128)]
        );
    }

    #[test]
    fn syntax_problems_exit_2() {
        for text in [
            "experiment = rb_sweep\nseed = one\n",
            "experiment = rb_sweep\nseed = 1\nseed = 2\n",
            "experiment = rb_sweep\nseed = 1\ncolour = blue\n",
            "experiment = rb_sweep\nseed 1\n",
            "experiment = sweep\nseed = 1\n",
            "experiment = eval\nseed = 1\nalg = magic\n",
            "experiment = rb_sweep\nseed = 1\nn = 20, x\n",
        ] {
            assert_eq!(parse(text).unwrap_err().exit_code(), crate::exit::PARSE, "{text:?}");
        }
    }

    #[test]
    fn invalid_values_exit_3() {
        for text in [
            "experiment = rb_sweep\n",
            "seed = 1\n",
            "experiment = rb_sweep\nseed = 1\ntrials = 0\n",
            "experiment = rb_sweep\nseed = 1\nn = 2\n",
            "experiment = pav_sweep\nseed = 1\nr = 10\n",
            "experiment = pav_sweep\nseed = 1\nr = 37, 49\nn = 80\n",
            "experiment = eval\nseed = 1\nalg = rb\n",
            "experiment = compose\nseed = 1\n",
        ] {
            assert_eq!(parse(text).unwrap_err().exit_code(), crate::exit::VALIDATION, "{text:?}");
        }
    }
}
