use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::Matroid;
use crate::error::{invalid, Result};
use crate::ElementSet;

/// `U_{r,n}`: every `r`-subset is a basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformMatroid {
    rank: usize,
    size: usize,
}

impl UniformMatroid {
    pub fn new(rank: usize, size: usize) -> Result<Self> {
        if rank > size {
            return Err(invalid(format!("uniform matroid rank {rank} exceeds size {size}")));
        }
        Ok(UniformMatroid { rank, size })
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.size
    }

    fn rank(&self, set: &ElementSet) -> usize {
        set.len().min(self.rank)
    }
}

/// Cycle matroid of a multigraph. Element `i` is edge `i`; loops and
/// parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphicMatroid {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(invalid(format!("edge ({u}, {v}) references a vertex outside 0..{vertices}")));
        }
        Ok(GraphicMatroid { vertices, edges })
    }

    /// `M(K_n)`, edges in lexicographic order of their endpoints.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        GraphicMatroid { vertices: n, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl Matroid for GraphicMatroid {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }

    // Each successful union merges two components, so the count equals
    // (vertices touched) - (components of the edge-induced subgraph).
    fn rank(&self, set: &ElementSet) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        let mut rank = 0;
        for e in set.iter() {
            let (u, v) = self.edges[e];
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
                rank += 1;
            }
        }
        rank
    }
}

/// Column matroid of an `rows × n` matrix over `GF(p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMatroid {
    prime: u64,
    rows: usize,
    cols: usize,
    /// Row-major entries, each reduced mod `prime`.
    entries: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

impl LinearMatroid {
    pub const MAX_PRIME: u64 = 1 << 31;

    /// `rows` is a list of matrix rows of equal length; entries may be any
    /// integers and are reduced mod `prime`.
    pub fn new(prime: u64, rows: Vec<Vec<i64>>) -> Result<Self> {
        if prime > Self::MAX_PRIME || !is_prime(prime) {
            return Err(invalid(format!("field order {prime} is not a prime <= 2^31")));
        }
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("matrix rows have unequal lengths"));
        }
        let p = prime as i64;
        let entries = rows.iter().flatten().map(|&a| a.rem_euclid(p) as u64).collect();
        Ok(LinearMatroid { prime, rows: rows.len(), cols, entries })
    }

    /// A matrix with zero rows and `cols` columns (all elements loops).
    pub fn zero(prime: u64, cols: usize) -> Result<Self> {
        let mut m = Self::new(prime, Vec::new())?;
        m.cols = cols;
        Ok(m)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn entry(&self, row: usize, col: usize) -> u64 {
        self.entries[row * self.cols + col]
    }
}

impl Matroid for LinearMatroid {
    fn ground_size(&self) -> usize {
        self.cols
    }

    // Gaussian elimination over GF(p) on the selected columns, stored as
    // vectors of length `rows`. Pivots are normalised with Fermat inverses.
    fn rank(&self, set: &ElementSet) -> usize {
        let p = self.prime;
        let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
        for c in set.iter() {
            let mut v: Vec<u64> = (0..self.rows).map(|r| self.entry(r, c)).collect();
            for (pivot, b) in &basis {
                let f = v[*pivot];
                if f != 0 {
                    for (x, y) in v.iter_mut().zip(b.iter()) {
                        *x = (*x + (p - f) * y) % p;
                    }
                }
            }
            if let Some(pivot) = v.iter().position(|&x| x != 0) {
                let inv = mod_pow(v[pivot], p - 2, p);
                for x in v.iter_mut() {
                    *x = *x * inv % p;
                }
                basis.push((pivot, v));
                if basis.len() == self.rows {
                    break;
                }
            }
        }
        basis.len()
    }
}

/// Sparse paving matroid of rank `r`: rank `min(|X|, r)` except that each
/// listed circuit-hyperplane `H` (an `r`-set) has rank `r - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePavingMatroid {
    rank: usize,
    size: usize,
    hyperplanes: BTreeSet<ElementSet>,
}

impl SparsePavingMatroid {
    /// Validates that every listed set has size `r`, lies in `0..n`, and
    /// that any two listed sets meet in at most `r - 2` elements.
    pub fn new(rank: usize, size: usize, hyperplanes: impl IntoIterator<Item = ElementSet>) -> Result<Self> {
        if rank > size {
            return Err(invalid(format!("sparse paving rank {rank} exceeds size {size}")));
        }
        let list: Vec<ElementSet> = hyperplanes.into_iter().collect();
        for h in &list {
            if h.len() != rank || h.bound() > size {
                return Err(invalid(format!("circuit-hyperplane {h:?} is not an {rank}-subset of 0..{size}")));
            }
        }
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                if a == b {
                    return Err(invalid(format!("circuit-hyperplane {a:?} listed twice")));
                }
                if a.intersection(b).len() + 2 > rank {
                    return Err(invalid(format!("circuit-hyperplanes {a:?} and {b:?} share more than r-2 elements")));
                }
            }
        }
        Ok(Self::from_validated(rank, size, list.into_iter().collect()))
    }

    pub(crate) fn from_validated(rank: usize, size: usize, hyperplanes: BTreeSet<ElementSet>) -> Self {
        SparsePavingMatroid { rank, size, hyperplanes }
    }

    pub fn hyperplanes(&self) -> &BTreeSet<ElementSet> {
        &self.hyperplanes
    }

    pub fn declared_rank(&self) -> usize {
        self.rank
    }
}

impl Matroid for SparsePavingMatroid {
    fn ground_size(&self) -> usize {
        self.size
    }

    fn rank(&self, set: &ElementSet) -> usize {
        let k = set.len();
        if k == self.rank && self.hyperplanes.contains(set) {
            self.rank - 1
        } else {
            k.min(self.rank)
        }
    }
}

/// The 5×10 `GF(2)` matrix `[I_5 | A]` representing `R_10`, where the rows
/// of `A` are the cyclic shifts of `11001`.
pub fn r10_matrix() -> Vec<Vec<i64>> {
    let a = [[1, 1, 0, 0, 1], [1, 1, 1, 0, 0], [0, 1, 1, 1, 0], [0, 0, 1, 1, 1], [1, 0, 0, 1, 1]];
    (0..5)
        .map(|i| {
            let mut row = vec![0i64; 10];
            row[i] = 1;
            row[5..].copy_from_slice(&a[i]);
            row
        })
        .collect()
}

/// `R_10` as a binary column matroid.
pub fn r10() -> LinearMatroid {
    LinearMatroid::new(2, r10_matrix()).expect("R10 matrix is well-formed")
}
