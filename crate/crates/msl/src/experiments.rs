//! Experiment drivers. Trials and rows run on the rayon pool; every random
//! choice comes from a substream of the config seed, so output does not
//! depend on the number of workers.

use std::sync::Mutex;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use msl_core::algorithms::{AlgorithmSpec, Pav, RandomBasis, Uni, PAV_VERIFY_LIMIT};
use msl_core::combinators::{regular_compose, restrict_wrap, tree_compose, CompositionPlan, LeafFactory};
use msl_core::harness::{
    evaluate_exact, opt, run_trial, summarize, trial_rng, EvalReport, OnlineAlgorithm, RngCoins, SimulationMode,
};
use msl_core::ledger::{leaf_measurements, ledger_cases, tgreedy_factory, LedgerReport};
use msl_core::matroid::{is_paving, restrict, sample_sparse_paving, share, UniformMatroid, DEFAULT_BASIS_ATTEMPTS};
use msl_core::{Matroid, MatroidRef, Weighting};

use crate::config::{Config, Experiment};
use crate::format::{load_document, Document};
use crate::report::{write_csv, write_json, LedgerCsvRow, PlanView, Report, Row};
use crate::{exit, Error, Result};

/// Slack, in standard errors, of every one-sided bound check.
pub const SLACK_SE: f64 = 3.0;

const SUBSTREAM_BASE: u64 = 1 << 62;

/// The `k`-th derived seed of `seed`. Trial streams use small stream ids,
/// so derived seeds come from streams far above them.
pub fn substream(seed: u64, k: u64) -> u64 {
    trial_rng(seed, SUBSTREAM_BASE + k).next_u64()
}

/// [`msl_core::harness::evaluate_monte_carlo`] with trials spread over the
/// rayon pool. Results are identical to the sequential version.
pub fn monte_carlo(
    alg: &dyn OnlineAlgorithm,
    m: &dyn Matroid,
    weights: &Weighting,
    trials: u64,
    seed: u64,
) -> Result<EvalReport> {
    let n = m.ground_size();
    if alg.ground_size() != n || weights.len() != n {
        return Err(Error::Validation(format!(
            "{} is bound to {} elements and the weighting has {}, but the matroid has {n}",
            alg.name(),
            alg.ground_size(),
            weights.len()
        )));
    }
    if trials == 0 {
        return Err(Error::Validation("at least one trial is required".into()));
    }
    let prototype = Mutex::new(alg.boxed_clone());
    let outcomes = (0..trials)
        .into_par_iter()
        .map_init(
            || prototype.lock().expect("prototype lock").boxed_clone(),
            |a, t| run_trial(a.as_mut(), m, weights, seed, t, SimulationMode::Record),
        )
        .collect::<msl_core::Result<Vec<_>>>()?;
    Ok(summarize(alg.name(), opt(m, weights)?, &outcomes))
}

/// Exact when asked (and small enough), Monte Carlo otherwise.
pub fn evaluate(
    alg: &dyn OnlineAlgorithm,
    m: &dyn Matroid,
    weights: &Weighting,
    trials: u64,
    seed: u64,
    exact: bool,
) -> Result<EvalReport> {
    if exact {
        let mut a = alg.boxed_clone();
        Ok(evaluate_exact(a.as_mut(), m, weights)?)
    } else {
        monte_carlo(alg, m, weights, trials, seed)
    }
}

/// `2 + γ/√n`.
pub fn rb_bound(n: usize, gamma: f64) -> f64 {
    2.0 + gamma / (n as f64).sqrt()
}

/// `(1 − 6/√r)^{-1}`, for `r >= 37`.
pub fn pav_bound(r: usize) -> f64 {
    1.0 / (1.0 - 6.0 / (r as f64).sqrt())
}

/// `(1 − 5/√k)^{-1}`, for `k >= 26`.
pub fn uni_bound(k: usize) -> f64 {
    1.0 / (1.0 - 5.0 / (k as f64).sqrt())
}

struct RowContext<'a> {
    experiment: Experiment,
    instance: String,
    m: &'a MatroidRef,
    h: Option<usize>,
    bound: f64,
}

fn make_row(ctx: RowContext<'_>, report: &EvalReport) -> Row {
    Row {
        experiment: ctx.experiment.to_string(),
        instance: ctx.instance,
        n: ctx.m.ground_size(),
        r: ctx.m.full_rank(),
        h: ctx.h,
        algorithm: report.algorithm.clone(),
        trials: report.trials,
        exact: report.exact,
        mean: report.expected_weight,
        se: report.standard_error.unwrap_or(0.0),
        opt: report.opt,
        ratio: report.ratio,
        bound: ctx.bound,
        satisfied: report.violations == 0 && report.meets_ratio(ctx.bound, SLACK_SE),
        violations: report.violations,
    }
}

/// A seeded sparse paving sample, checked for paving-ness when small.
fn sparse_paving_instance(n: usize, r: usize, h: usize, seed: u64) -> Result<(MatroidRef, usize)> {
    let mut coins = RngCoins(ChaCha8Rng::seed_from_u64(seed));
    let sample = sample_sparse_paving(n, r, h, &mut coins, DEFAULT_BASIS_ATTEMPTS)?;
    let kept = sample.matroid.hyperplanes().len();
    if !sample.complete {
        eprintln!("warning: sparse paving sample n={n} r={r} kept {kept} of {h} hyperplanes");
    }
    let m = share(sample.matroid);
    if n <= PAV_VERIFY_LIMIT && !is_paving(m.as_ref())? {
        return Err(Error::Validation(format!("sampled matroid n={n} r={r} is not paving")));
    }
    Ok((m, kept))
}

fn jobs<T: Copy>(items: &[T], instances: usize) -> Vec<(T, usize)> {
    items.iter().flat_map(|&x| (0..instances).map(move |i| (x, i))).collect()
}

/// RB on sampled sparse paving matroids with `r = ⌊n/2⌋`, against
/// `2 + γ/√n`.
pub fn rb_sweep(cfg: &Config) -> Result<Vec<Row>> {
    jobs(&cfg.rb_sizes(), cfg.instances)
        .into_par_iter()
        .enumerate()
        .map(|(j, (n, i))| {
            let s = substream(cfg.seed, j as u64);
            let h = cfg.h.unwrap_or(n);
            let (m, kept) = sparse_paving_instance(n, n / 2, h, substream(s, 0))?;
            let weights = cfg.weights.sample(n, substream(s, 1));
            let alg = RandomBasis::new(m.clone())?;
            let report = evaluate(&alg, m.as_ref(), &weights, cfg.trials, substream(s, 2), cfg.exact)?;
            let ctx = RowContext {
                experiment: Experiment::RbSweep,
                instance: format!("sparse-paving#{i}"),
                m: &m,
                h: Some(kept),
                bound: rb_bound(n, cfg.gamma),
            };
            Ok(make_row(ctx, &report))
        })
        .collect()
}

/// PAV on sampled sparse paving matroids of rank `r`, against
/// `(1 − 6/√r)^{-1}`, each followed by the UNI row its proof goes through:
/// UNI of rank `r − 1` on `U_{r−1, n}` against `(1 − 5/√(r−1))^{-1}`.
pub fn pav_sweep(cfg: &Config) -> Result<Vec<Row>> {
    let rows: Vec<[Row; 2]> = jobs(&cfg.pav_shapes(), cfg.instances)
        .into_par_iter()
        .enumerate()
        .map(|(j, ((r, n), i))| {
            let s = substream(cfg.seed, j as u64);
            let (m, kept) = sparse_paving_instance(n, r, cfg.h.unwrap_or(n), substream(s, 0))?;
            let weights = cfg.weights.sample(n, substream(s, 1));
            let pav = Pav::new(m.as_ref())?;
            let report = evaluate(&pav, m.as_ref(), &weights, cfg.trials, substream(s, 2), cfg.exact)?;
            let ctx = RowContext {
                experiment: Experiment::PavSweep,
                instance: format!("sparse-paving#{i}"),
                m: &m,
                h: Some(kept),
                bound: pav_bound(r),
            };
            let pav_row = make_row(ctx, &report);

            let u = share(UniformMatroid::new(r - 1, n)?);
            let weights = cfg.weights.sample(n, substream(s, 3));
            let uni = Uni::new(r - 1, n)?;
            let report = evaluate(&uni, u.as_ref(), &weights, cfg.trials, substream(s, 4), cfg.exact)?;
            let ctx = RowContext {
                experiment: Experiment::PavSweep,
                instance: format!("uniform#{i}"),
                m: &u,
                h: None,
                bound: uni_bound(r - 1),
            };
            Ok([pav_row, make_row(ctx, &report)])
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// The wrapper ledger over the built-in cases, one case per worker.
pub fn ledger(trials: u64, seed: u64) -> Result<LedgerReport> {
    let cases = ledger_cases(seed)?;
    let rows = cases.into_par_iter().map(|c| c.evaluate(trials, seed)).collect::<msl_core::Result<_>>()?;
    Ok(LedgerReport { rows })
}

/// The ratio claimed for `spec` on `m`, where one applies.
fn claimed_ratio(spec: &AlgorithmSpec, m: &dyn Matroid) -> f64 {
    let r = m.full_rank();
    match spec {
        AlgorithmSpec::Classical { sample: None } if r == 1 && m.ground_size() > 0 => std::f64::consts::E,
        AlgorithmSpec::Pav if r >= crate::config::PAV_MIN_RANK => pav_bound(r),
        _ => f64::INFINITY,
    }
}

fn load(cfg: &Config) -> Result<Document> {
    load_document(cfg.matroid.as_deref().expect("validated: matroid is set"))
}

/// One algorithm on one matroid file.
pub fn eval(cfg: &Config) -> Result<Vec<Row>> {
    let doc = load(cfg)?;
    let spec = cfg.alg.as_ref().expect("validated: alg is set");
    let m = doc.matroid;
    let alg = spec.build(&m)?;
    let weights = cfg.weights.sample(m.ground_size(), substream(cfg.seed, 1));
    let report = evaluate(alg.as_ref(), m.as_ref(), &weights, cfg.trials, substream(cfg.seed, 2), cfg.exact)?;
    let bound = claimed_ratio(spec, m.as_ref());
    let ctx = RowContext { experiment: Experiment::Eval, instance: doc.name, m: &m, h: None, bound };
    Ok(vec![make_row(ctx, &report)])
}

/// Tree composition over the decomposition in a matroid file. Labelled
/// decompositions go through the regular-matroid composition; otherwise
/// every leaf runs `cfg.leaf`. The composed row's bound is the plan's
/// claim at the measured leaf constant; the leaf rows follow it.
pub fn compose(cfg: &Config) -> Result<(Vec<Row>, CompositionPlan)> {
    let doc = load(cfg)?;
    let d =
        doc.decomposition.as_ref().ok_or_else(|| Error::Validation(format!("{} has no decomposition", doc.name)))?;
    let m = doc.matroid.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(substream(cfg.seed, 0));
    let leaf_spec = cfg.leaf.clone();
    let mut spec_factory = move |_: usize, part: MatroidRef| leaf_spec.build(&part);
    let mut tgreedy = tgreedy_factory();
    let (alg, plan, factory): (Box<dyn OnlineAlgorithm>, CompositionPlan, &mut LeafFactory<'_>) = match &d.part_labels {
        Some(labels) => {
            let (alg, plan) = regular_compose(m.clone(), &d.tree, labels, d.keep.as_ref(), &mut rng)?;
            (alg, plan, &mut tgreedy)
        }
        None => {
            let (alg, plan) = tree_compose(m.clone(), &d.tree, &mut spec_factory, &mut rng)?;
            let alg: Box<dyn OnlineAlgorithm> = match &d.keep {
                Some(keep) => Box::new(restrict_wrap(alg, keep)?),
                None => alg,
            };
            (alg, plan, &mut spec_factory)
        }
    };

    let full_weights = cfg.weights.sample(m.ground_size(), substream(cfg.seed, 1));
    let (target, weights, leaf_weights): (MatroidRef, Weighting, Weighting) = match &d.keep {
        Some(keep) => {
            let target: MatroidRef = share(restrict(m.clone(), keep)?);
            (target, full_weights.pull_back(&keep.to_vec()), full_weights.zeroed_outside(keep))
        }
        None => (m.clone(), full_weights.clone(), full_weights),
    };

    let trial_seed = substream(cfg.seed, 2);
    let mut rows = Vec::new();
    let mut c: f64 = 1.0;
    let vertices = plan
        .peels
        .iter()
        .map(|p| (p.vertex, &p.part))
        .chain(Some((plan.root.vertex, &plan.root.part)))
        .filter(|(_, part)| !part.is_empty())
        .map(|(v, _)| v + 1);
    let leaves = leaf_measurements(&m, &plan, &leaf_weights, factory)?;
    for (vertex, leaf) in vertices.zip(leaves) {
        let report =
            monte_carlo(leaf.algorithm.as_ref(), leaf.matroid.as_ref(), &leaf.weights, cfg.trials, trial_seed)?;
        c = c.max(report.ratio);
        let ctx = RowContext {
            experiment: Experiment::Compose,
            instance: format!("{}/vertex{vertex}", doc.name),
            m: &leaf.matroid,
            h: None,
            bound: f64::INFINITY,
        };
        rows.push(make_row(ctx, &report));
    }
    let report = evaluate(alg.as_ref(), target.as_ref(), &weights, cfg.trials, trial_seed, cfg.exact)?;
    let ctx = RowContext {
        experiment: Experiment::Compose,
        instance: doc.name.clone(),
        m: &target,
        h: None,
        bound: plan.claimed_ratio(c),
    };
    rows.insert(0, make_row(ctx, &report));
    let mut plan = plan;
    plan.leaf_constant = Some(c);
    Ok((rows, plan))
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: Report,
}

impl RunSummary {
    /// One line per row, for the terminal.
    pub fn lines(&self) -> Vec<String> {
        let rows = self.report.rows.iter().map(|r| r.to_string());
        let ledger = self.report.ledger.iter().map(|r| {
            format!(
                "ledger {} {} [{}]: ratio {:.4} bound {:.4} (c_meas {:.4}) violations {} {}",
                r.fixture,
                r.wrapper,
                r.weights,
                r.ratio,
                r.bound,
                r.inner_ratio,
                r.violations,
                if r.passed { "pass" } else { "FAIL" }
            )
        });
        rows.chain(ledger).collect()
    }

    pub fn ledger_failures(&self) -> usize {
        self.report.ledger.iter().filter(|r| !r.passed).count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.ledger_failures() > 0 {
            exit::LEDGER_VIOLATION
        } else {
            exit::OK
        }
    }
}

/// Runs the configured experiment and writes the requested outputs.
pub fn run(cfg: &Config) -> Result<RunSummary> {
    cfg.validate()?;
    let mut report = Report {
        experiment: cfg.experiment.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        rows: Vec::new(),
        ledger: Vec::new(),
        plan: None,
    };
    match cfg.experiment {
        Experiment::RbSweep => report.rows = rb_sweep(cfg)?,
        Experiment::PavSweep => report.rows = pav_sweep(cfg)?,
        Experiment::Eval => report.rows = eval(cfg)?,
        Experiment::Compose => {
            let (rows, plan) = compose(cfg)?;
            report.rows = rows;
            report.plan = Some(PlanView::from(&plan));
        }
        Experiment::Ledger => {
            report.ledger = ledger(cfg.trials, cfg.seed)?.rows.iter().map(LedgerCsvRow::from).collect();
        }
    }
    if let Some(path) = &cfg.out_csv {
        if cfg.experiment == Experiment::Ledger {
            write_csv(path, &report.ledger)?;
        } else {
            write_csv(path, &report.rows)?;
        }
    }
    if let Some(path) = &cfg.out_json {
        write_json(path, &report)?;
    }
    Ok(RunSummary { report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formulas() {
        assert!((pav_bound(49) - 7.0).abs() < 1e-12);
        assert!((uni_bound(100) - 2.0).abs() < 1e-12);
        assert!((rb_bound(100, 2.0) - 2.2).abs() < 1e-15);
    }

    #[test]
    fn uni_chain_dominates_pav_bound_from_37() {
        for r in 37..2000usize {
            let rf = r as f64;
            let chain = (1.0 - 5.0 / (rf - 1.0).sqrt()) * (1.0 - 1.0 / rf);
            assert!(chain >= 1.0 - 6.0 / rf.sqrt(), "r = {r}");
        }
    }

    #[test]
    fn parallel_monte_carlo_matches_sequential() {
        let m = msl_core::fixtures::k4();
        let w = msl_core::fixtures::uniform_weights(6, 3);
        let mut alg = msl_core::algorithms::ThresholdGreedy::new(m.clone(), 0.37).unwrap();
        let par = monte_carlo(&alg, m.as_ref(), &w, 500, 11).unwrap();
        let seq = msl_core::harness::evaluate_monte_carlo(&mut alg, m.as_ref(), &w, 500, 11).unwrap();
        assert_eq!(par, seq);
    }

    #[test]
    fn ledger_failures_exit_4() {
        let row = LedgerCsvRow {
            fixture: "f".into(),
            wrapper: "lift".into(),
            weights: "uniform".into(),
            inner_ratio: 1.0,
            inner_expected_weight: 1.0,
            ratio: 9.0,
            expected_weight: 0.1,
            se: 0.0,
            opt: 0.9,
            bound: 2.0,
            violations: 0,
            passed: false,
        };
        let mut summary = RunSummary {
            report: Report {
                experiment: "ledger".into(),
                seed: 0,
                trials: 1,
                rows: Vec::new(),
                ledger: vec![row.clone()],
                plan: None,
            },
        };
        assert_eq!(summary.exit_code(), exit::LEDGER_VIOLATION);
        summary.report.ledger[0].passed = true;
        assert_eq!(summary.exit_code(), exit::OK);
    }

    #[test]
    fn substreams_differ() {
        let a: Vec<u64> = (0..8).map(|k| substream(5, k)).collect();
        let mut b = a.clone();
        b.dedup();
        assert_eq!(a.len(), b.len());
        assert_ne!(substream(5, 0), substream(6, 0));
    }
}
