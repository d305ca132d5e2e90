//! Local connectivity, the connectivity function, tree-decompositions and
//! perturbation witnesses.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::error::{invalid, Error, Result};
use crate::matroid::{
    check_in_ground, closure, contract, delete, extend_independent, minor, rank_functions_equal, restrict, Matroid,
    MatroidRef, Minor,
};
use crate::ElementSet;

/// `⊓_M(X, Y) = r(X) + r(Y) - r(X ∪ Y)` for disjoint `X`, `Y`.
pub fn local_connectivity(m: &dyn Matroid, x: &ElementSet, y: &ElementSet) -> Result<usize> {
    check_in_ground(m, x)?;
    check_in_ground(m, y)?;
    if !x.is_disjoint(y) {
        return Err(invalid(format!("sets {x:?} and {y:?} overlap")));
    }
    Ok(m.rank(x) + m.rank(y) - m.rank(&x.union(y)))
}

/// `λ_M(X) = ⊓_M(X, E - X)`.
pub fn lambda(m: &dyn Matroid, x: &ElementSet) -> Result<usize> {
    let rest = x.complement(m.ground_size());
    local_connectivity(m, x, &rest)
}

/// A tree `T` with a partition of `E(M)` indexed by its vertices. Vertex
/// `i` carries the caller's label `labels[i]` (kept through leaf removal).
/// Parts may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    parts: Vec<ElementSet>,
    edges: Vec<(usize, usize)>,
    labels: Vec<usize>,
}

impl TreeDecomposition {
    /// Validates that `edges` form a tree on `0..parts.len()` and that the
    /// parts partition `0..ground_size`.
    pub fn new(ground_size: usize, parts: Vec<ElementSet>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let labels = (0..parts.len()).collect();
        Self::with_labels(ground_size, parts, edges, labels)
    }

    pub fn with_labels(
        ground_size: usize,
        parts: Vec<ElementSet>,
        edges: Vec<(usize, usize)>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        let k = parts.len();
        if k == 0 {
            return Err(invalid("a tree-decomposition needs at least one vertex"));
        }
        if labels.len() != k {
            return Err(invalid("one label per tree vertex is required"));
        }
        if edges.len() + 1 != k {
            return Err(invalid(format!("{} edges cannot form a tree on {k} vertices", edges.len())));
        }
        let mut comp: Vec<usize> = (0..k).collect();
        fn root(c: &mut [usize], mut x: usize) -> usize {
            while c[x] != x {
                c[x] = c[c[x]];
                x = c[x];
            }
            x
        }
        for &(u, v) in &edges {
            if u >= k || v >= k {
                return Err(invalid(format!("tree edge ({u}, {v}) references a missing vertex")));
            }
            let (a, b) = (root(&mut comp, u), root(&mut comp, v));
            if a == b {
                return Err(invalid("tree edges contain a cycle"));
            }
            comp[a] = b;
        }
        let mut covered = ElementSet::new();
        for (i, p) in parts.iter().enumerate() {
            if p.bound() > ground_size {
                return Err(Error::ElementOutOfRange { element: p.bound() - 1, ground_size });
            }
            if !covered.is_disjoint(p) {
                return Err(invalid(format!("part of vertex {i} overlaps an earlier part")));
            }
            covered.union_with(p);
        }
        if covered.len() != ground_size {
            return Err(invalid("parts do not cover the ground set"));
        }
        Ok(TreeDecomposition { parts, edges, labels })
    }

    pub fn vertex_count(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[ElementSet] {
        &self.parts
    }

    pub fn part(&self, v: usize) -> &ElementSet {
        &self.parts[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    /// Leaves in increasing vertex order.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.degree(v) == 1).collect()
    }

    /// Union of the parts on `from`'s side of the tree edge `{from, other}`.
    fn side(&self, from: usize, other: usize) -> ElementSet {
        let mut out = ElementSet::new();
        let mut stack = alloc::vec![(from, other)];
        while let Some((v, parent)) = stack.pop() {
            out.union_with(&self.parts[v]);
            for w in self.neighbors(v) {
                if w != parent {
                    stack.push((w, v));
                }
            }
        }
        out
    }

    /// The decomposition of `M \ X_leaf` left after removing `leaf`, with
    /// parts relabelled through `local_index` (parent element → index in
    /// the deletion).
    pub(crate) fn without_leaf(
        &self,
        leaf: usize,
        local_index: impl Fn(usize) -> usize,
        ground_size: usize,
    ) -> Result<Self> {
        let keep: Vec<usize> = (0..self.vertex_count()).filter(|&v| v != leaf).collect();
        let renumber = |v: usize| keep.iter().position(|&w| w == v).expect("vertex kept");
        let parts = keep.iter().map(|&v| self.parts[v].iter().map(&local_index).collect()).collect();
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != leaf && b != leaf)
            .map(|&(a, b)| (renumber(a), renumber(b)))
            .collect();
        let labels = keep.iter().map(|&v| self.labels[v]).collect();
        Self::with_labels(ground_size, parts, edges, labels)
    }
}

/// `λ(e) = λ_M(X_1)` for tree edge `index`, `X_1` the union of parts on one side.
pub fn edge_thickness(m: &dyn Matroid, td: &TreeDecomposition, index: usize) -> Result<usize> {
    let &(u, v) = td.edges.get(index).ok_or_else(|| invalid(format!("no tree edge {index}")))?;
    check_ground(m, td)?;
    lambda(m, &td.side(u, v))
}

/// Maximum edge thickness; zero for a single vertex.
pub fn thickness(m: &dyn Matroid, td: &TreeDecomposition) -> Result<usize> {
    check_ground(m, td)?;
    (0..td.edges.len()).try_fold(0, |acc, i| Ok(acc.max(edge_thickness(m, td, i)?)))
}

fn check_ground(m: &dyn Matroid, td: &TreeDecomposition) -> Result<()> {
    let covered = td.parts.iter().fold(ElementSet::new(), |acc, p| acc.union(p));
    if covered != ElementSet::full(m.ground_size()) {
        return Err(invalid("tree-decomposition does not partition this matroid's ground set"));
    }
    Ok(())
}

/// Whether `⊓_M(X_u, X_v) = λ(uv)` on every tree edge.
pub fn is_full(m: &dyn Matroid, td: &TreeDecomposition) -> Result<bool> {
    check_ground(m, td)?;
    for (i, &(u, v)) in td.edges.iter().enumerate() {
        if local_connectivity(m, &td.parts[u], &td.parts[v])? != edge_thickness(m, td, i)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of [`normalize_leaf`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafNormalization {
    pub decomposition: TreeDecomposition,
    pub neighbor: usize,
    pub moved: ElementSet,
    pub lambda_before: usize,
    pub lambda_after: usize,
}

/// Moves `X_ℓ ∩ cl_M(X_u)` from the leaf `ℓ` into its neighbour `u`.
pub fn normalize_leaf(m: &dyn Matroid, td: &TreeDecomposition, leaf: usize) -> Result<LeafNormalization> {
    check_ground(m, td)?;
    if leaf >= td.vertex_count() || td.degree(leaf) != 1 {
        return Err(invalid(format!("vertex {leaf} is not a leaf")));
    }
    let u = td.neighbors(leaf).next().expect("leaf has a neighbour");
    let moved = td.parts[leaf].intersection(&closure(m, &td.parts[u])?);
    let mut next = td.clone();
    next.parts[leaf] = td.parts[leaf].difference(&moved);
    next.parts[u] = td.parts[u].union(&moved);
    let lambda_before = lambda(m, &td.parts[leaf])?;
    let lambda_after = lambda(m, &next.parts[leaf])?;

    debug_assert!(lambda_after <= lambda_before);
    debug_assert!(next.parts[leaf].is_disjoint(&closure(m, &next.parts[u])?));
    debug_assert!(!is_full(m, td)? || is_full(m, &next)?);

    Ok(LeafNormalization { decomposition: next, neighbor: u, moved, lambda_before, lambda_after })
}

/// Which side of `{ambient / x, ambient \ x}` is the starting matroid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Direction {
    /// From `ambient / x` to its lift `ambient \ x`.
    Lift,
    /// From `ambient \ x` to its projection `ambient / x`.
    Projection,
}

/// A witness that two matroids on `E(ambient) - x` are one lift or
/// projection apart.
#[derive(Debug, Clone)]
pub struct PerturbationStep {
    pub ambient: MatroidRef,
    pub element: usize,
    pub direction: Direction,
}

impl PerturbationStep {
    pub fn new(ambient: MatroidRef, element: usize, direction: Direction) -> Result<Self> {
        if element >= ambient.ground_size() {
            return Err(Error::ElementOutOfRange { element, ground_size: ambient.ground_size() });
        }
        if ambient.rank(&ElementSet::singleton(element)) == 0 {
            return Err(invalid(format!("perturbation element {element} is a loop of the ambient matroid")));
        }
        Ok(PerturbationStep { ambient, element, direction })
    }

    /// `ambient \ x`.
    pub fn deletion(&self) -> Minor {
        delete(self.ambient.clone(), &ElementSet::singleton(self.element)).expect("element in range")
    }

    /// `ambient / x`.
    pub fn contraction(&self) -> Minor {
        contract(self.ambient.clone(), &ElementSet::singleton(self.element)).expect("element in range")
    }

    pub fn source(&self) -> MatroidRef {
        match self.direction {
            Direction::Lift => self.contraction().into(),
            Direction::Projection => self.deletion().into(),
        }
    }

    pub fn target(&self) -> MatroidRef {
        match self.direction {
            Direction::Lift => self.deletion().into(),
            Direction::Projection => self.contraction().into(),
        }
    }
}

/// Whether `step` carries `from` to `to` (rank functions compared on every
/// subset of the common ground set).
pub fn verify_perturbation_step(step: &PerturbationStep, from: &dyn Matroid, to: &dyn Matroid) -> Result<bool> {
    let n = step.ambient.ground_size() - 1;
    if from.ground_size() != n || to.ground_size() != n {
        return Err(invalid(format!(
            "ground sets differ: ambient minus x has {n} elements, matroids have {} and {}",
            from.ground_size(),
            to.ground_size()
        )));
    }
    Ok(rank_functions_equal(step.source().as_ref(), from)? && rank_functions_equal(step.target().as_ref(), to)?)
}

/// The constructive content of "M/(E−X) is M|X after λ_M(X) projections".
///
/// `I1` is a basis of `M|X`, `I1 ∪ I2` a basis of `M`, `I2 ∪ I3` a basis of
/// `M \ X`, and `N = (M / I2) | (X ∪ I3)`. Then `N \ I3 = M|X`,
/// `N / I3 = M / (E - X)` and `|I3| = λ_M(X)`.
#[derive(Debug, Clone)]
pub struct LambdaWitness {
    pub x: ElementSet,
    pub i1: ElementSet,
    pub i2: ElementSet,
    pub i3: ElementSet,
    /// `N`, on `X ∪ I3` relabelled in increasing order of `M`'s elements.
    pub ambient: MatroidRef,
    /// `ambient` local element → element of `M`.
    pub ambient_elements: Vec<usize>,
}

/// Builds a [`LambdaWitness`] by greedy basis extension (`I1`, then `I2`,
/// then `I3`), scanning elements in an order shuffled by `rng`.
pub fn lemma_lambda_witness<R: RngCore + ?Sized>(m: MatroidRef, x: &ElementSet, rng: &mut R) -> Result<LambdaWitness> {
    check_in_ground(m.as_ref(), x)?;
    let n = m.ground_size();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let outside = x.complement(n);
    let in_x = order.iter().copied().filter(|&e| x.contains(e));
    let i1 = extend_independent(m.as_ref(), &ElementSet::new(), in_x);
    let out_x: Vec<usize> = order.iter().copied().filter(|&e| outside.contains(e)).collect();
    let i1_i2 = extend_independent(m.as_ref(), &i1, out_x.iter().copied());
    let i2 = i1_i2.difference(&i1);
    let i2_i3 = extend_independent(m.as_ref(), &i2, out_x.iter().copied());
    let i3 = i2_i3.difference(&i2);

    let keep = x.union(&i3);
    let drop = keep.union(&i2).complement(n);
    let ambient = minor(m, &i2, &drop)?;
    let ambient_elements = ambient.parent_elements().to_vec();
    Ok(LambdaWitness { x: x.clone(), i1, i2, i3, ambient: ambient.into(), ambient_elements })
}

impl LambdaWitness {
    /// `I3` in the ambient matroid's local labels, increasing.
    pub fn i3_local(&self) -> Vec<usize> {
        (0..self.ambient_elements.len()).filter(|&i| self.i3.contains(self.ambient_elements[i])).collect()
    }

    pub fn projection_count(&self) -> usize {
        self.i3.len()
    }

    /// `N \ I3`, which equals `M|X` with the same labels.
    pub fn start_matroid(&self) -> MatroidRef {
        delete(self.ambient.clone(), &self.i3_local().into_iter().collect()).expect("I3 in range").into()
    }

    /// `N / I3`, which equals `M / (E - X)` with the same labels.
    pub fn end_matroid(&self) -> MatroidRef {
        contract(self.ambient.clone(), &self.i3_local().into_iter().collect()).expect("I3 in range").into()
    }

    /// The single-element projections from `N \ I3` to `N / I3`: step `j`
    /// has ambient `N / {y_1..y_{j-1}} \ {y_{j+1}..y_t}` and element `y_j`.
    pub fn projection_chain(&self) -> Vec<PerturbationStep> {
        let ys = self.i3_local();
        (0..ys.len())
            .map(|j| {
                let contract_set: ElementSet = ys[..j].iter().copied().collect();
                let delete_set: ElementSet = ys[j + 1..].iter().copied().collect();
                let amb = minor(self.ambient.clone(), &contract_set, &delete_set).expect("disjoint I3 pieces");
                let x = amb.local_index(ys[j]).expect("y_j survives");
                PerturbationStep::new(amb.into(), x, Direction::Projection).expect("I3 is independent in N")
            })
            .collect()
    }

    /// Checks every invariant exhaustively (small ground sets only).
    pub fn verify(&self, m: MatroidRef) -> Result<()> {
        let n = m.ground_size();
        let rest = self.x.complement(n);
        let fail = |what: &str| Err(invalid(format!("lambda witness check failed: {what}")));
        if !self.i1.is_subset(&self.x) || !self.i2.union(&self.i3).is_subset(&rest) || !self.i2.is_disjoint(&self.i3) {
            return fail("sets are misplaced");
        }
        let r = |s: &ElementSet| m.rank(s);
        if r(&self.i1) != self.i1.len() || r(&self.i1) != r(&self.x) {
            return fail("I1 is not a basis of M|X");
        }
        let i12 = self.i1.union(&self.i2);
        if r(&i12) != i12.len() || r(&i12) != m.full_rank() {
            return fail("I1 ∪ I2 is not a basis of M");
        }
        let i23 = self.i2.union(&self.i3);
        if r(&i23) != i23.len() || r(&i23) != r(&rest) {
            return fail("I2 ∪ I3 is not a basis of M \\ X");
        }
        if self.i3.len() != lambda(m.as_ref(), &self.x)? {
            return fail("|I3| differs from lambda");
        }
        let restricted = restrict(m.clone(), &self.x)?;
        if !rank_functions_equal(self.start_matroid().as_ref(), &restricted)? {
            return fail("N \\ I3 differs from M|X");
        }
        let contracted = contract(m, &rest)?;
        if !rank_functions_equal(self.end_matroid().as_ref(), &contracted)? {
            return fail("N / I3 differs from M / (E - X)");
        }
        Ok(())
    }
}

impl core::fmt::Display for Direction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Direction::Lift => "lift",
            Direction::Projection => "projection",
        })
    }
}

#[cfg(test)]
mod tests;
