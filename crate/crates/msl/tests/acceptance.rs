//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Runs with `harness = false` so the lines always reach the terminal.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use msl::config::{Config, Experiment};
use msl::experiments::{self, monte_carlo};
use msl_core::algorithms::{ClassicalSecretary, Pav, RandomBasis, ThresholdGreedy, Uni};
use msl_core::combinators::{tree_compose, LeafFactory};
use msl_core::connectivity::{lambda, lemma_lambda_witness};
use msl_core::fixtures::{self, Fixture};
use msl_core::harness::{evaluate_exact, CoinSpace, EvalReport, OnlineAlgorithm};
use msl_core::ledger::ledger_cases;
use msl_core::matroid::{
    contract, count_bases, density, enumerate_bases, enumerate_circuits, is_paving, loops, max_weight_basis, r10,
    rank_functions_equal, restrict, share,
};
use msl_core::{ElementSet, Matroid, MatroidRef, Ratio, Weighting};

/// One-sided slack of every Monte Carlo comparison, in standard errors.
const SLACK_SE: f64 = 3.0;
/// Relative tolerance of exact floating-point identities.
const REL_TOL: f64 = 1e-12;
const TRIALS: u64 = 10_000;
const EXACT_LIMIT: usize = 8;
const SEED: u64 = 20_240_611;

const SOUNDNESS_BUDGET: Duration = Duration::from_secs(300);
const RB_SWEEP_BUDGET: Duration = Duration::from_secs(60);
const PAV_SWEEP_BUDGET: Duration = Duration::from_secs(300);

type Check = Result<String, String>;
type LeafMaker = fn(MatroidRef) -> Box<dyn OnlineAlgorithm>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn exact(alg: &dyn OnlineAlgorithm, m: &dyn Matroid, w: &Weighting) -> EvalReport {
    let mut a = alg.boxed_clone();
    evaluate_exact(a.as_mut(), m, w).expect("exact evaluation")
}

fn is_uniform(f: &Fixture) -> bool {
    f.name.starts_with("U(") && !f.name.contains('+')
}

fn paving(f: &Fixture) -> bool {
    if f.matroid.ground_size() <= 16 {
        is_paving(f.matroid.as_ref()).expect("small")
    } else {
        is_uniform(f) || f.name.starts_with("sparse-paving")
    }
}

/// Every leaf algorithm whose preconditions `f` meets.
fn algorithms(f: &Fixture) -> Vec<Box<dyn OnlineAlgorithm>> {
    let m = &f.matroid;
    let n = m.ground_size();
    let r = m.full_rank();
    let mut out: Vec<Box<dyn OnlineAlgorithm>> = vec![
        Box::new(RandomBasis::new(m.clone()).unwrap()),
        Box::new(ThresholdGreedy::new(m.clone(), 1.0 / std::f64::consts::E).unwrap()),
    ];
    if loops(m.as_ref()).is_empty() {
        out.push(Box::new(ClassicalSecretary::new(n)));
    }
    if is_uniform(f) {
        out.push(Box::new(Uni::new(r, n).unwrap()));
    }
    if r >= 2 && paving(f) {
        out.push(Box::new(Pav::new(m.as_ref()).unwrap()));
    }
    out
}

/// Exhaustive when small with finite coins, 10^4 Monte Carlo trials otherwise.
fn violations(alg: &dyn OnlineAlgorithm, m: &dyn Matroid, w: &Weighting, seed: u64) -> (u64, bool) {
    if m.ground_size() <= EXACT_LIMIT && alg.coin_space() != CoinSpace::Unbounded {
        (exact(alg, m, w).violations, true)
    } else {
        (monte_carlo(alg, m, w, TRIALS, seed).expect("monte carlo").violations, false)
    }
}

fn c1_soundness() -> Check {
    let start = Instant::now();
    let mut runs = Vec::new();
    for (i, f) in fixtures::all_fixtures().into_iter().enumerate() {
        let w = fixtures::uniform_weights(f.matroid.ground_size(), SEED + i as u64);
        for alg in algorithms(&f) {
            runs.push((format!("{} on {}", alg.name(), f.name), alg, f.matroid.clone(), w.clone()));
        }
    }
    for case in ledger_cases(SEED).map_err(|e| e.to_string())? {
        let name = format!("{} on {} [{}]", case.wrapper, case.fixture, case.weights.name());
        runs.push((name, case.wrapped.algorithm, case.wrapped.matroid, case.wrapped.weights));
    }
    let results: Vec<(String, u64, bool)> = runs
        .into_par_iter()
        .enumerate()
        .map(|(i, (name, alg, m, w))| {
            let (v, ex) = violations(alg.as_ref(), m.as_ref(), &w, SEED ^ i as u64);
            (name, v, ex)
        })
        .collect();
    let bad: Vec<_> = results.iter().filter(|r| r.1 > 0).map(|r| format!("{}: {}", r.0, r.1)).collect();
    ensure(bad.is_empty(), || format!("violations: {}", bad.join("; ")))?;
    let elapsed = start.elapsed();
    ensure(elapsed < SOUNDNESS_BUDGET, || format!("took {elapsed:?}"))?;
    let exhaustive = results.iter().filter(|r| r.2).count();
    Ok(format!("{} runs ({exhaustive} exhaustive), 0 violations", results.len()))
}

fn c2_exact_equivalence() -> Check {
    let mut compared = 0;
    for (i, f) in fixtures::small_fixtures().into_iter().enumerate() {
        let m = f.matroid.as_ref();
        let w = fixtures::uniform_weights(m.ground_size(), SEED + 100 + i as u64);
        for alg in algorithms(&f).into_iter().filter(|a| a.coin_space() != CoinSpace::Unbounded) {
            let ex = exact(alg.as_ref(), m, &w);
            let mc = monte_carlo(alg.as_ref(), m, &w, TRIALS, SEED + i as u64).map_err(|e| e.to_string())?;
            let se = mc.standard_error.unwrap_or(0.0);
            let gap = (mc.expected_weight - ex.expected_weight).abs();
            ensure(gap <= SLACK_SE * se + REL_TOL * ex.expected_weight.abs(), || {
                format!(
                    "{} on {}: exact {} vs mc {} (se {se})",
                    alg.name(),
                    f.name,
                    ex.expected_weight,
                    mc.expected_weight
                )
            })?;
            compared += 1;
        }
    }
    let mut greedy = 0;
    for f in fixtures::all_fixtures().into_iter().filter(|f| f.matroid.ground_size() <= 12) {
        let m = f.matroid.as_ref();
        let n = m.ground_size();
        let bases = enumerate_bases(m).map_err(|e| e.to_string())?;
        let tied = Weighting::new((0..n).map(|e| (e % 3 + 1) as f64).collect()).expect("finite");
        for w in [fixtures::uniform_weights(n, SEED + 7), fixtures::uniform_weights(n, SEED + 8), tied] {
            let brute = bases.iter().map(|b| w.of(b)).fold(f64::NEG_INFINITY, f64::max);
            let g = w.of(&max_weight_basis(m, &w).map_err(|e| e.to_string())?);
            ensure(g == brute, || format!("{}: greedy {g} vs brute force {brute}", f.name))?;
            greedy += 1;
        }
    }
    Ok(format!("{compared} exact/Monte Carlo pairs within {SLACK_SE} SE, {greedy} greedy optima equal brute force"))
}

fn c3_random_basis() -> Check {
    let mut checked = 0;
    for (i, f) in fixtures::small_fixtures().into_iter().enumerate() {
        let m = f.matroid.as_ref();
        let n = m.ground_size();
        let w = fixtures::uniform_weights(n, SEED + 200 + i as u64);
        let bases = enumerate_bases(m).map_err(|e| e.to_string())?;
        let formula: f64 =
            (0..n).map(|e| w.get(e) * bases.iter().filter(|b| b.contains(e)).count() as f64 / bases.len() as f64).sum();
        let got = exact(&RandomBasis::new(f.matroid.clone()).unwrap(), m, &w).expected_weight;
        ensure(rel_close(formula, got), || format!("{}: formula {formula} vs exact {got}", f.name))?;
        checked += 1;
    }
    let mut cfg = Config::new(Experiment::RbSweep, SEED);
    cfg.n = vec![20, 40, 80];
    cfg.trials = TRIALS;
    let start = Instant::now();
    let rows = experiments::rb_sweep(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for row in &rows {
        ensure(row.satisfied, || format!("rb_sweep row violated: {row}"))?;
    }
    ensure(elapsed < RB_SWEEP_BUDGET, || format!("rb_sweep took {elapsed:?}"))?;
    let ratios: Vec<String> = rows.iter().map(|r| format!("n={} {:.3}<={:.3}", r.n, r.ratio, r.bound)).collect();
    Ok(format!("formula on {checked} fixtures; sweep {} in {:.1}s", ratios.join(", "), elapsed.as_secs_f64()))
}

fn c4_paving() -> Check {
    let mut cfg = Config::new(Experiment::PavSweep, SEED);
    cfg.r = vec![37, 49, 64];
    cfg.trials = TRIALS;
    let start = Instant::now();
    let rows = experiments::pav_sweep(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let pav: Vec<_> = rows.iter().filter(|r| r.algorithm == "pav").map(|r| r.r).collect();
    let uni: Vec<_> = rows.iter().filter(|r| r.algorithm.starts_with("uni")).map(|r| r.r).collect();
    ensure(pav == [37, 49, 64] && uni == [36, 48, 63], || format!("unexpected rows: pav {pav:?}, uni {uni:?}"))?;
    for row in &rows {
        ensure(row.n == 2 * if row.algorithm == "pav" { row.r } else { row.r + 1 }, || format!("shape: {row}"))?;
        ensure(row.satisfied, || format!("row violated: {row}"))?;
    }
    ensure(elapsed < PAV_SWEEP_BUDGET, || format!("pav_sweep took {elapsed:?}"))?;
    let worst = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(format!("{} rows within bound, worst ratio {worst:.3}, {:.1}s", rows.len(), elapsed.as_secs_f64()))
}

/// Successes of "skip `s`, take the first record" over all orders of
/// `0..n`, where `n - 1` is best.
fn classical_successes(n: usize, s: usize) -> u64 {
    fn walk(perm: &mut Vec<usize>, used: &mut [bool], n: usize, s: usize) -> u64 {
        if perm.len() == n {
            let threshold = perm[..s].iter().copied().max();
            let pick = perm[s..].iter().copied().find(|&x| threshold.is_none_or(|t| x > t));
            return u64::from(pick == Some(n - 1));
        }
        let mut total = 0;
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                perm.push(x);
                total += walk(perm, used, n, s);
                perm.pop();
                used[x] = false;
            }
        }
        total
    }
    walk(&mut Vec::new(), &mut vec![false; n], n, s)
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn c5_classical() -> Check {
    let indicator = |n: usize| {
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        Weighting::new(w).expect("finite")
    };
    ensure(classical_successes(3, 1) * 2 == factorial(3), || "n=3 oracle is not 1/2".into())?;
    let alg = ClassicalSecretary::with_sample(3, 1).unwrap();
    let p3 = exact(&alg, fixtures::uniform(1, 3).as_ref(), &indicator(3)).expected_weight;
    ensure((p3 - 0.5).abs() <= f64::EPSILON, || format!("n=3 exact {p3}"))?;

    // 10! * (3/10) * sum_{j=4}^{10} 1/(j-1) = 3 * 9! * sum_{k=3}^{9} 1/k.
    let analytic: u64 = (3..=9).map(|k| 3 * factorial(9) / k).sum();
    let counted = classical_successes(10, 3);
    ensure(counted == analytic, || format!("n=10: {counted} successes, formula {analytic}"))?;
    let p10 = 0.3 * (4..=10).map(|j| 1.0 / (j as f64 - 1.0)).sum::<f64>();
    ensure((p10 - 0.3987).abs() < 5e-5, || format!("formula value {p10}"))?;
    let alg = ClassicalSecretary::with_sample(10, 3).unwrap();
    let mc = monte_carlo(&alg, fixtures::uniform(1, 10).as_ref(), &indicator(10), 10 * TRIALS, SEED)
        .map_err(|e| e.to_string())?;
    let se = mc.standard_error.unwrap_or(0.0);
    ensure((mc.expected_weight - p10).abs() <= SLACK_SE * se, || format!("n=10 mc {} (se {se})", mc.expected_weight))?;
    Ok(format!("n=3 exact {p3}; n=10 exact {counted}/10! = {p10:.6}, mc {:.4} ± {se:.4}", mc.expected_weight))
}

fn c6_ledger() -> Check {
    let report = experiments::ledger(TRIALS, SEED).map_err(|e| e.to_string())?;
    let failures: Vec<String> = report.failures().map(|r| r.to_string()).collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    let violations: u64 = report.rows.iter().map(|r| r.violations).sum();
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("{} rows pass", report.rows.len()))
}

fn subsets(set: &ElementSet) -> impl Iterator<Item = ElementSet> + '_ {
    let elems = set.to_vec();
    (0..1u64 << elems.len())
        .map(move |mask| elems.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect())
}

fn c7_witness() -> Check {
    let pool: Vec<Fixture> = fixtures::all_fixtures().into_iter().filter(|f| f.matroid.ground_size() <= 10).collect();
    let count: usize = pool
        .par_iter()
        .enumerate()
        .map(|(fi, f)| -> Result<usize, String> {
            let m = f.matroid.clone();
            let n = m.ground_size();
            let all = ElementSet::full(n);
            let mut rng = ChaCha8Rng::seed_from_u64(SEED + fi as u64);
            let mut pairs = 0;
            for x in subsets(&all) {
                let rest = x.complement(n);
                let w = lemma_lambda_witness(m.clone(), &x, &mut rng).map_err(|e| e.to_string())?;
                let fail = |what: &str| format!("{} X={:?}: {what}", f.name, x.to_vec());
                let lam = m.rank(&x) + m.rank(&rest) - m.full_rank();
                if w.i3.len() != lam || lambda(m.as_ref(), &x).map_err(|e| e.to_string())? != lam {
                    return Err(fail("|I3| differs from lambda"));
                }
                // N = (M / I2) | (X ∪ I3), checked against M's rank directly.
                let r2 = m.rank(&w.i2);
                let i23 = w.i2.union(&w.i3);
                let r23 = m.rank(&i23);
                let to_m = |local: &ElementSet| -> ElementSet { local.iter().map(|e| w.ambient_elements[e]).collect() };
                for t in subsets(&ElementSet::full(w.ambient_elements.len())) {
                    let tm = to_m(&t);
                    if w.ambient.rank(&t) != m.rank(&tm.union(&w.i2)) - r2 {
                        return Err(fail("N is not (M / I2) | (X ∪ I3)"));
                    }
                    if tm.is_subset(&x) {
                        if m.rank(&tm.union(&w.i2)) - r2 != m.rank(&tm) {
                            return Err(fail("N \\ I3 differs from M|X"));
                        }
                        let contracted = m.rank(&tm.union(&i23)) - r23;
                        if contracted != m.rank(&tm.union(&rest)) - m.rank(&rest) {
                            return Err(fail("N / I3 differs from M / (E - X)"));
                        }
                    }
                }
                let mx: MatroidRef = share(restrict(m.clone(), &x).map_err(|e| e.to_string())?);
                let mc: MatroidRef = share(contract(m.clone(), &rest).map_err(|e| e.to_string())?);
                let same =
                    |a: &MatroidRef, b: &MatroidRef| rank_functions_equal(a.as_ref(), b.as_ref()).unwrap_or(false);
                if !same(&w.start_matroid(), &mx) || !same(&w.end_matroid(), &mc) {
                    return Err(fail("start/end matroids differ"));
                }
                pairs += 1;
            }
            Ok(pairs)
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    Ok(format!("{count} (M, X) pairs over {} fixtures", pool.len()))
}

fn c8_lambda() -> Check {
    let results: Vec<Result<(u64, u64), String>> = fixtures::all_fixtures()
        .into_par_iter()
        .enumerate()
        .map(|(fi, f)| {
            let m = f.matroid.as_ref();
            let n = m.ground_size();
            let lam = |x: &ElementSet| lambda(m, x).expect("in range");
            let mut sym = 0;
            let mut sub = 0;
            if n <= EXACT_LIMIT {
                let all: Vec<ElementSet> = subsets(&ElementSet::full(n)).collect();
                let values: Vec<usize> = all.iter().map(lam).collect();
                let index = |s: &ElementSet| s.iter().fold(0usize, |acc, e| acc | 1 << e);
                for (i, x) in all.iter().enumerate() {
                    if values[i] != values[index(&x.complement(n))] {
                        return Err(format!("{}: symmetry fails at {:?}", f.name, x.to_vec()));
                    }
                    sym += 1;
                    for (j, y) in all.iter().enumerate() {
                        let meet = values[index(&x.intersection(y))];
                        let join = values[index(&x.union(y))];
                        if values[i] + values[j] < meet + join {
                            return Err(format!("{}: submodularity fails", f.name));
                        }
                        sub += 1;
                    }
                }
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(SEED + fi as u64);
                let mut random_set = || -> ElementSet { (0..n).filter(|_| rng.gen_bool(0.5)).collect() };
                for _ in 0..TRIALS {
                    let (x, y) = (random_set(), random_set());
                    if lam(&x) != lam(&x.complement(n)) {
                        return Err(format!("{}: symmetry fails", f.name));
                    }
                    if lam(&x) + lam(&y) < lam(&x.intersection(&y)) + lam(&x.union(&y)) {
                        return Err(format!("{}: submodularity fails", f.name));
                    }
                    sym += 1;
                    sub += 1;
                }
            }
            Ok((sym, sub))
        })
        .collect();
    let (mut sym, mut sub) = (0, 0);
    for r in results {
        let (a, b) = r?;
        sym += a;
        sub += b;
    }
    Ok(format!("{sym} symmetry and {sub} submodularity checks, 0 violations"))
}

fn c9_additivity() -> Check {
    let mut cases = vec![fixtures::direct_sum_decomposition()];
    let m: MatroidRef = share(msl_core::matroid::direct_sum(fixtures::uniform(2, 3), fixtures::uniform(2, 4)));
    let td = msl_core::connectivity::TreeDecomposition::new(
        7,
        vec![ElementSet::from_mask(0b0000111), ElementSet::from_mask(0b1111000)],
        vec![(0, 1)],
    )
    .map_err(|e| e.to_string())?;
    cases.push(fixtures::DecompositionFixture { name: "U(2,3)+U(2,4)".into(), matroid: m, decomposition: td });
    let mut lines = Vec::new();
    for (i, fx) in cases.into_iter().enumerate() {
        let n = fx.matroid.ground_size();
        let w = fixtures::uniform_weights(n, SEED + 300 + i as u64);
        let leaves: [(&str, LeafMaker); 2] = [
            ("tgreedy", |m| Box::new(ThresholdGreedy::new(m, 0.5).unwrap())),
            ("classical", |m| Box::new(ClassicalSecretary::new(m.ground_size()))),
        ];
        for (label, make) in leaves {
            let mut factory = |_: usize, part: MatroidRef| Ok(make(part));
            let factory: &mut LeafFactory<'_> = &mut factory;
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let (alg, plan) =
                tree_compose(fx.matroid.clone(), &fx.decomposition, factory, &mut rng).map_err(|e| e.to_string())?;
            ensure(plan.thickness == 0, || format!("{}: thickness {}", fx.name, plan.thickness))?;
            let whole = exact(alg.as_ref(), fx.matroid.as_ref(), &w).expected_weight;
            let mut sum = 0.0;
            for part in fx.decomposition.parts() {
                let pm: MatroidRef = share(restrict(fx.matroid.clone(), part).map_err(|e| e.to_string())?);
                sum += exact(make(pm.clone()).as_ref(), pm.as_ref(), &w.pull_back(&part.to_vec())).expected_weight;
            }
            ensure(rel_close(whole, sum), || format!("{} {label}: composed {whole} vs parts {sum}", fx.name))?;
            lines.push(format!("{} {label} {whole:.12}", fx.name));
        }
    }
    Ok(lines.join(", "))
}

fn c10_r10() -> Check {
    let m = r10();
    ensure(m.ground_size() == 10, || format!("{} elements", m.ground_size()))?;
    ensure(m.full_rank() == 5, || format!("rank {}", m.full_rank()))?;
    let circuits = enumerate_circuits(&m).map_err(|e| e.to_string())?;
    let smallest = circuits.iter().map(|c| c.len()).min().unwrap_or(0);
    ensure(smallest >= 4, || format!("a circuit of size {smallest}"))?;
    let d = density(share(m.clone())).map_err(|e| e.to_string())?;
    ensure(d == Ratio::new(2, 1), || format!("density {d}"))?;
    let bases = count_bases(&m).map_err(|e| e.to_string())?;
    Ok(format!("10 elements, rank 5, {} circuits (min size {smallest}), {bases} bases, density {d}", circuits.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("soundness", c1_soundness),
        ("exact oracle equivalence", c2_exact_equivalence),
        ("random-basis formula and sweep", c3_random_basis),
        ("paving and uniform sweeps", c4_paving),
        ("classical secretary values", c5_classical),
        ("wrapper ratio ledger", c6_ledger),
        ("lambda witness", c7_witness),
        ("connectivity function", c8_lambda),
        ("thickness-0 additivity", c9_additivity),
        ("R10", c10_r10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
