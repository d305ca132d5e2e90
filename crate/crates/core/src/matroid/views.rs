use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{check_in_ground, share, Matroid, MatroidRef};
use crate::error::{invalid, Result};
use crate::ElementSet;

/// `M*`, with `r*(X) = |X| + r(E - X) - r(E)`.
#[derive(Debug, Clone)]
pub struct Dual {
    inner: MatroidRef,
    inner_rank: usize,
}

impl Dual {
    pub fn inner(&self) -> &MatroidRef {
        &self.inner
    }
}

impl Matroid for Dual {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn rank(&self, set: &ElementSet) -> usize {
        let rest = set.complement(self.inner.ground_size());
        set.len() + self.inner.rank(&rest) - self.inner_rank
    }
}

pub fn dual(m: MatroidRef) -> Dual {
    let inner_rank = m.full_rank();
    Dual { inner: m, inner_rank }
}

/// `M / C \ D`, relabelled onto `0..|E - C - D|` in increasing parent order.
#[derive(Debug, Clone)]
pub struct Minor {
    inner: MatroidRef,
    contracted: ElementSet,
    contracted_rank: usize,
    /// Local element `i` is parent element `elements[i]`.
    elements: Vec<usize>,
}

impl Minor {
    pub fn parent(&self) -> &MatroidRef {
        &self.inner
    }

    /// The relabelling map back to the parent ground set.
    pub fn parent_elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn to_parent(&self, set: &ElementSet) -> ElementSet {
        set.map_through(&self.elements)
    }

    /// Local index of a parent element, if it survives in the minor.
    pub fn local_index(&self, parent: usize) -> Option<usize> {
        self.elements.binary_search(&parent).ok()
    }
}

impl Matroid for Minor {
    fn ground_size(&self) -> usize {
        self.elements.len()
    }

    fn rank(&self, set: &ElementSet) -> usize {
        let mut lifted = self.contracted.clone();
        for e in set.iter() {
            lifted.insert(self.elements[e]);
        }
        self.inner.rank(&lifted) - self.contracted_rank
    }
}

/// `M / C \ D`. Fails if `C` and `D` overlap or leave the ground set.
pub fn minor(m: MatroidRef, contract: &ElementSet, delete: &ElementSet) -> Result<Minor> {
    check_in_ground(m.as_ref(), contract)?;
    check_in_ground(m.as_ref(), delete)?;
    if !contract.is_disjoint(delete) {
        return Err(invalid(format!("contract set {contract:?} and delete set {delete:?} overlap")));
    }
    let removed = contract.union(delete);
    let elements = removed.complement(m.ground_size()).to_vec();
    let contracted_rank = m.rank(contract);
    Ok(Minor { inner: m, contracted: contract.clone(), contracted_rank, elements })
}

/// `M | X`.
pub fn restrict(m: MatroidRef, keep: &ElementSet) -> Result<Minor> {
    check_in_ground(m.as_ref(), keep)?;
    let delete = keep.complement(m.ground_size());
    minor(m, &ElementSet::new(), &delete)
}

/// `M \ D`.
pub fn delete(m: MatroidRef, set: &ElementSet) -> Result<Minor> {
    minor(m, &ElementSet::new(), set)
}

/// `M / C`.
pub fn contract(m: MatroidRef, set: &ElementSet) -> Result<Minor> {
    minor(m, set, &ElementSet::new())
}

/// Rank capped at `cap`.
#[derive(Debug, Clone)]
pub struct Truncation {
    inner: MatroidRef,
    cap: usize,
}

impl Matroid for Truncation {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn rank(&self, set: &ElementSet) -> usize {
        self.inner.rank(set).min(self.cap)
    }
}

/// `T(M)`: the truncation to rank `r(M) - 1`.
pub fn truncate(m: MatroidRef) -> Result<Truncation> {
    let r = m.full_rank();
    if r == 0 {
        return Err(invalid("cannot truncate a rank-0 matroid"));
    }
    Ok(Truncation { inner: m, cap: r - 1 })
}

/// Truncation to rank `min(cap, r(M))`.
pub fn truncate_to(m: MatroidRef, cap: usize) -> Truncation {
    Truncation { inner: m, cap }
}

/// `M1 ⊕ M2` on `0..n1` followed by `n1..n1+n2`.
#[derive(Debug, Clone)]
pub struct DirectSum {
    left: MatroidRef,
    right: MatroidRef,
}

impl DirectSum {
    pub fn left_size(&self) -> usize {
        self.left.ground_size()
    }
}

impl Matroid for DirectSum {
    fn ground_size(&self) -> usize {
        self.left.ground_size() + self.right.ground_size()
    }

    fn rank(&self, set: &ElementSet) -> usize {
        let split = self.left.ground_size();
        let mut left = ElementSet::new();
        let mut right = ElementSet::new();
        for e in set.iter() {
            if e < split {
                left.insert(e);
            } else {
                right.insert(e - split);
            }
        }
        self.left.rank(&left) + self.right.rank(&right)
    }
}

pub fn direct_sum(left: MatroidRef, right: MatroidRef) -> DirectSum {
    DirectSum { left, right }
}

/// `si(M)` plus the map from parent elements to their class representative.
#[derive(Debug, Clone)]
pub struct Simplification {
    pub matroid: Minor,
    /// `representative[e]` is the local index in `matroid` of the
    /// representative of `e`'s parallel class, or `None` for loops.
    pub representative: Vec<Option<usize>>,
}

/// Deletes loops and keeps the smallest element of each parallel class.
pub fn simplify(m: MatroidRef) -> Simplification {
    let n = m.ground_size();
    let mut rep_parent: Vec<Option<usize>> = alloc::vec![None; n];
    let mut reps = ElementSet::new();
    for (e, rep) in rep_parent.iter_mut().enumerate() {
        if m.rank(&ElementSet::singleton(e)) == 0 {
            continue;
        }
        let found = reps.iter().find(|&f| m.rank(&ElementSet::singleton(f).with(e)) == 1);
        if found.is_none() {
            reps.insert(e);
        }
        *rep = Some(found.unwrap_or(e));
    }
    let matroid = restrict(m, &reps).expect("representatives lie in the ground set");
    let representative =
        rep_parent.iter().map(|r| r.map(|p| matroid.local_index(p).expect("representative kept"))).collect();
    Simplification { matroid, representative }
}

impl From<Minor> for MatroidRef {
    fn from(m: Minor) -> Self {
        share(m)
    }
}

impl From<Dual> for MatroidRef {
    fn from(m: Dual) -> Self {
        share(m)
    }
}

impl From<Truncation> for MatroidRef {
    fn from(m: Truncation) -> Self {
        share(m)
    }
}

impl From<DirectSum> for MatroidRef {
    fn from(m: DirectSum) -> Self {
        Arc::new(m)
    }
}
