use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::RngCore;

use super::{disjoint_union, multi_project_wrap, projection_bound, restrict_wrap};
use crate::algorithms::{RejectAll, ThresholdGreedy};
use crate::connectivity::{is_full, lemma_lambda_witness, normalize_leaf, thickness, TreeDecomposition};
use crate::error::{invalid, Error, Result};
use crate::harness::OnlineAlgorithm;
use crate::matroid::{closure, delete, density, restrict, Matroid, MatroidRef};
use crate::{ElementSet, Ratio};

/// One leaf removal in [`tree_compose`]. Element ids refer to the matroid
/// passed to `tree_compose`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PeelRecord {
    /// Label of the peeled vertex.
    pub vertex: usize,
    /// Label of its neighbour at the time of peeling.
    pub neighbor: usize,
    /// Elements moved from the leaf into the neighbour by normalization.
    pub moved: Vec<usize>,
    /// The leaf's part after normalization.
    pub part: Vec<usize>,
    /// Size of the closure the leaf algorithm was built for.
    pub closure_size: usize,
    pub lambda_before: usize,
    pub lambda_after: usize,
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub i3: Vec<usize>,
    /// `t = |I3|`, the number of projections wrapped around the leaf.
    pub projections: usize,
    /// Name of the fully wrapped leaf algorithm (`None` for an empty part).
    pub algorithm: Option<String>,
}

/// The vertex left when the recursion bottoms out.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RootRecord {
    pub vertex: usize,
    pub part: Vec<usize>,
    pub algorithm: Option<String>,
}

/// Trace of a tree composition and the constants it claims.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CompositionPlan {
    /// Thickness `k` of the supplied decomposition.
    pub thickness: usize,
    /// The `k` used in the claim (at least `thickness`).
    pub claim_thickness: usize,
    /// Leaf constant `c`, once known.
    pub leaf_constant: Option<f64>,
    pub peels: Vec<PeelRecord>,
    pub root: RootRecord,
}

impl CompositionPlan {
    /// `c (e + 1)^k`.
    pub fn claimed_ratio(&self, c: f64) -> f64 {
        projection_bound(c, self.claim_thickness)
    }

    /// The claim at the recorded leaf constant.
    pub fn claim(&self) -> Option<f64> {
        self.leaf_constant.map(|c| self.claimed_ratio(c))
    }

    /// Vertex labels in the order they were handled (peels, then root).
    pub fn vertex_order(&self) -> Vec<usize> {
        self.peels.iter().map(|p| p.vertex).chain(Some(self.root.vertex)).collect()
    }
}

/// Builds the leaf algorithm for a vertex from `M|cl(X_v)`. The first
/// argument is the vertex label.
pub type LeafFactory<'a> = dyn FnMut(usize, MatroidRef) -> Result<Box<dyn OnlineAlgorithm>> + 'a;

fn call_factory(factory: &mut LeafFactory<'_>, vertex: usize, m: MatroidRef) -> Result<Box<dyn OnlineAlgorithm>> {
    let n = m.ground_size();
    let alg = factory(vertex, m).map_err(|e| Error::LeafFactory { vertex, reason: e.to_string() })?;
    if alg.ground_size() != n {
        return Err(Error::LeafFactory {
            vertex,
            reason: format!("algorithm is bound to {} elements, expected {n}", alg.ground_size()),
        });
    }
    Ok(alg)
}

fn lift_ids(set: &ElementSet, to_root: &[usize]) -> Vec<usize> {
    set.iter().map(|e| to_root[e]).collect()
}

/// Composes leaf algorithms over a full tree-decomposition: repeatedly peel
/// the lowest-indexed leaf, normalize it, wrap the factory algorithm for
/// `M|cl(X_ℓ)` in a restriction to `X_ℓ` and the projections of a lambda
/// witness, and run it alongside the composition for `M \ X_ℓ`.
pub fn tree_compose<R: RngCore + ?Sized>(
    m: MatroidRef,
    td: &TreeDecomposition,
    factory: &mut LeafFactory<'_>,
    rng: &mut R,
) -> Result<(Box<dyn OnlineAlgorithm>, CompositionPlan)> {
    if !is_full(m.as_ref(), td)? {
        return Err(invalid("tree-decomposition is not full"));
    }
    let k = thickness(m.as_ref(), td)?;
    let to_root: Vec<usize> = (0..m.ground_size()).collect();
    let mut peels = Vec::new();
    let (alg, root) = compose(m, td.clone(), &to_root, factory, rng, &mut peels)?;
    let plan = CompositionPlan { thickness: k, claim_thickness: k, leaf_constant: None, peels, root };
    Ok((alg, plan))
}

fn compose<R: RngCore + ?Sized>(
    m: MatroidRef,
    td: TreeDecomposition,
    to_root: &[usize],
    factory: &mut LeafFactory<'_>,
    rng: &mut R,
    peels: &mut Vec<PeelRecord>,
) -> Result<(Box<dyn OnlineAlgorithm>, RootRecord)> {
    let n = m.ground_size();
    if td.vertex_count() == 1 {
        let vertex = td.labels()[0];
        let alg = if n == 0 { None } else { Some(call_factory(factory, vertex, m)?) };
        let root = RootRecord { vertex, part: to_root.to_vec(), algorithm: alg.as_ref().map(|a| a.name()) };
        return Ok((alg.unwrap_or_else(|| Box::new(RejectAll::new(0))), root));
    }

    let leaf = td.leaves()[0];
    let norm = normalize_leaf(m.as_ref(), &td, leaf)?;
    let td = norm.decomposition;
    let x = td.part(leaf).clone();
    let vertex = td.labels()[leaf];

    let mut record = PeelRecord {
        vertex,
        neighbor: td.labels()[norm.neighbor],
        moved: lift_ids(&norm.moved, to_root),
        part: lift_ids(&x, to_root),
        closure_size: 0,
        lambda_before: norm.lambda_before,
        lambda_after: norm.lambda_after,
        i1: Vec::new(),
        i2: Vec::new(),
        i3: Vec::new(),
        projections: 0,
        algorithm: None,
    };

    let leaf_alg: Box<dyn OnlineAlgorithm> = if x.is_empty() {
        Box::new(RejectAll::new(0))
    } else {
        let cl = closure(m.as_ref(), &x)?;
        record.closure_size = cl.len();
        let base = call_factory(factory, vertex, restrict(m.clone(), &cl)?.into())?;
        let base: Box<dyn OnlineAlgorithm> = if cl == x {
            base
        } else {
            let positions: Vec<usize> = cl.iter().collect();
            let keep: ElementSet = x.iter().map(|e| positions.binary_search(&e).expect("X ⊆ cl(X)")).collect();
            Box::new(restrict_wrap(base, &keep)?)
        };
        let witness = lemma_lambda_witness(m.clone(), &x, rng)?;
        record.i1 = lift_ids(&witness.i1, to_root);
        record.i2 = lift_ids(&witness.i2, to_root);
        record.i3 = lift_ids(&witness.i3, to_root);
        record.projections = witness.projection_count();
        let projected = multi_project_wrap(&witness, base)?;
        let alg: Box<dyn OnlineAlgorithm> = if projected.domain().len() == x.len() {
            Box::new(projected)
        } else {
            // Unreachable after normalization; kept so the output stays
            // independent even if a caller bypasses it.
            let dropped = projected.domain().complement(x.len());
            let rejects = Box::new(RejectAll::new(dropped.len()));
            Box::new(disjoint_union(
                x.len(),
                vec![(projected.domain().clone(), Box::new(projected) as Box<dyn OnlineAlgorithm>), (dropped, rejects)],
            )?)
        };
        record.algorithm = Some(alg.name());
        alg
    };
    peels.push(record);

    let rest = delete(m, &x)?;
    let rest_td =
        td.without_leaf(leaf, |e| rest.local_index(e).expect("element outside the leaf"), rest.ground_size())?;
    let rest_to_root: Vec<usize> = rest.parent_elements().iter().map(|&e| to_root[e]).collect();
    let (rest_alg, root) = compose(rest.into(), rest_td, &rest_to_root, factory, rng, peels)?;

    let union = disjoint_union(n, vec![(x.clone(), leaf_alg), (x.complement(n), rest_alg)])?;
    Ok((Box::new(union), root))
}

/// Piece type of a part in a supplied regular-matroid decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum PartLabel {
    Graphic,
    Cographic,
    /// A parallel extension of `R_10`.
    R10,
}

impl core::str::FromStr for PartLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graphic" => Ok(PartLabel::Graphic),
            "cographic" => Ok(PartLabel::Cographic),
            "r10" => Ok(PartLabel::R10),
            _ => Err(invalid(format!("unknown part label {s:?} (expected graphic, cographic or r10)"))),
        }
    }
}

impl core::fmt::Display for PartLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            PartLabel::Graphic => "graphic",
            PartLabel::Cographic => "cographic",
            PartLabel::R10 => "r10",
        })
    }
}

/// Sample fraction of the threshold-greedy stand-in used at every leaf.
const LEAF_RHO: f64 = 1.0 / core::f64::consts::E;

/// Tree composition over a supplied decomposition of `M'` into graphic,
/// cographic and `R_10`-extension parts (labels indexed by vertex label),
/// with an optional final restriction to the elements of `M`.
///
/// Graphic and cographic parts are not checked for their type; `R_10`
/// parts must have density exactly 2. Every leaf uses threshold greedy.
pub fn regular_compose<R: RngCore + ?Sized>(
    m_prime: MatroidRef,
    td: &TreeDecomposition,
    labels: &[PartLabel],
    restrict_to: Option<&ElementSet>,
    rng: &mut R,
) -> Result<(Box<dyn OnlineAlgorithm>, CompositionPlan)> {
    if let Some(&missing) = td.labels().iter().find(|&&l| l >= labels.len()) {
        return Err(invalid(format!("no part label for vertex {missing}")));
    }
    let k = thickness(m_prime.as_ref(), td)?;
    if k > 2 {
        return Err(invalid(format!("decomposition has thickness {k}, at most 2 is allowed")));
    }
    let mut factory = |vertex: usize, part: MatroidRef| -> Result<Box<dyn OnlineAlgorithm>> {
        if labels[vertex] == PartLabel::R10 {
            let d = density(part.clone())?;
            if d != Ratio::new(2, 1) {
                return Err(invalid(format!("part labelled r10 has density {d}, expected 2")));
            }
        }
        Ok(Box::new(ThresholdGreedy::new(part, LEAF_RHO)?))
    };
    let (alg, mut plan) = tree_compose(m_prime, td, &mut factory, rng)?;
    plan.claim_thickness = 2;
    let alg: Box<dyn OnlineAlgorithm> = match restrict_to {
        Some(keep) => Box::new(restrict_wrap(alg, keep)?),
        None => alg,
    };
    Ok((alg, plan))
}
