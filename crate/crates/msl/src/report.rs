//! Result rows and their CSV/JSON encodings. Non-finite numbers are written
//! as the strings `inf`, `-inf` and `nan` in both formats.

use std::fmt;
use std::fs;
use std::path::Path;

use msl_core::combinators::CompositionPlan;
use msl_core::ledger::LedgerRow;
use serde::{Serialize, Serializer};

use crate::{Error, Result};

pub(crate) fn float<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// One evaluated (instance, algorithm) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub instance: String,
    pub n: usize,
    pub r: usize,
    /// Hyperplanes actually kept, for sampled sparse paving instances.
    pub h: Option<usize>,
    pub algorithm: String,
    pub trials: u64,
    pub exact: bool,
    pub mean: f64,
    pub se: f64,
    pub opt: f64,
    #[serde(serialize_with = "float")]
    pub ratio: f64,
    /// The claimed ratio; `inf` when nothing is claimed for this instance.
    #[serde(serialize_with = "float")]
    pub bound: f64,
    pub satisfied: bool,
    pub violations: u64,
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} n={} r={} {}: mean {:.6} (se {:.6}) opt {:.6} ratio {:.4} bound {:.4} {}",
            self.experiment,
            self.instance,
            self.n,
            self.r,
            self.algorithm,
            self.mean,
            self.se,
            self.opt,
            self.ratio,
            self.bound,
            if self.satisfied { "ok" } else { "VIOLATED" }
        )
    }
}

/// Flat CSV form of a ledger row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerCsvRow {
    pub fixture: String,
    pub wrapper: String,
    pub weights: String,
    #[serde(serialize_with = "float")]
    pub inner_ratio: f64,
    pub inner_expected_weight: f64,
    #[serde(serialize_with = "float")]
    pub ratio: f64,
    pub expected_weight: f64,
    pub se: f64,
    pub opt: f64,
    #[serde(serialize_with = "float")]
    pub bound: f64,
    pub violations: u64,
    pub passed: bool,
}

impl From<&LedgerRow> for LedgerCsvRow {
    fn from(r: &LedgerRow) -> Self {
        LedgerCsvRow {
            fixture: r.fixture.clone(),
            wrapper: r.wrapper.to_string(),
            weights: r.weights.to_string(),
            inner_ratio: r.inner_ratio,
            inner_expected_weight: r.inner_expected_weight,
            ratio: r.ratio,
            expected_weight: r.expected_weight,
            se: r.standard_error,
            opt: r.opt,
            bound: r.bound,
            violations: r.violations,
            passed: r.passed,
        }
    }
}

/// A composition plan with 1-based element and vertex ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanView {
    pub thickness: usize,
    pub claim_thickness: usize,
    pub peels: Vec<PeelView>,
    pub root_vertex: usize,
    pub root_part: Vec<usize>,
    pub root_algorithm: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeelView {
    pub vertex: usize,
    pub neighbor: usize,
    pub moved: Vec<usize>,
    pub part: Vec<usize>,
    pub closure_size: usize,
    pub lambda_before: usize,
    pub lambda_after: usize,
    pub projections: usize,
    pub algorithm: Option<String>,
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|e| e + 1).collect()
}

impl From<&CompositionPlan> for PlanView {
    fn from(p: &CompositionPlan) -> Self {
        PlanView {
            thickness: p.thickness,
            claim_thickness: p.claim_thickness,
            peels: p
                .peels
                .iter()
                .map(|x| PeelView {
                    vertex: x.vertex + 1,
                    neighbor: x.neighbor + 1,
                    moved: one_based(&x.moved),
                    part: one_based(&x.part),
                    closure_size: x.closure_size,
                    lambda_before: x.lambda_before,
                    lambda_after: x.lambda_after,
                    projections: x.projections,
                    algorithm: x.algorithm.clone(),
                })
                .collect(),
            root_vertex: p.root.vertex + 1,
            root_part: one_based(&p.root.part),
            root_algorithm: p.root.algorithm.clone(),
        }
    }
}

/// The JSON document of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ledger: Vec<LedgerCsvRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanView>,
}

fn create_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| write_error(path, e)),
        _ => Ok(()),
    }
}

fn write_error(path: &Path, e: impl fmt::Display) -> Error {
    Error::Write { path: path.display().to_string(), message: e.to_string() }
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Write { path: "<csv>".into(), message: e.to_string() })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Write { path: "<csv>".into(), message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    create_parent(path)?;
    fs::write(path, csv_string(rows)?).map_err(|e| write_error(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    create_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| write_error(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| write_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(ratio: f64, bound: f64) -> Row {
        Row {
            experiment: "eval".into(),
            instance: "m".into(),
            n: 4,
            r: 2,
            h: None,
            algorithm: "rb".into(),
            trials: 10,
            exact: false,
            mean: 0.5,
            se: 0.01,
            opt: 1.0,
            ratio,
            bound,
            satisfied: true,
            violations: 0,
        }
    }

    #[test]
    fn infinities_are_strings() {
        let csv = csv_string(&[row(f64::INFINITY, f64::INFINITY)]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,instance,n,r,h,algorithm,trials,exact,mean,se,opt,ratio,bound,satisfied,violations"
        );
        assert_eq!(lines.next().unwrap(), "eval,m,4,2,,rb,10,false,0.5,0.01,1.0,inf,inf,true,0");
        let json = serde_json::to_value(row(2.0, f64::INFINITY)).unwrap();
        assert_eq!(json["ratio"], 2.0);
        assert_eq!(json["bound"], "inf");
    }
}
