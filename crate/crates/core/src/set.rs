use alloc::vec::Vec;
use core::fmt;
use smallvec::SmallVec;

const BITS: usize = 64;

/// A finite set of element indices, stored as a bitset.
///
/// The word vector never carries trailing zero words, so derived equality,
/// ordering and hashing agree with set semantics.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementSet {
    words: SmallVec<[u64; 2]>,
}

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut words: SmallVec<[u64; 2]> = SmallVec::new();
        let whole = n / BITS;
        for _ in 0..whole {
            words.push(u64::MAX);
        }
        let rest = n % BITS;
        if rest > 0 {
            words.push((1u64 << rest) - 1);
        }
        ElementSet { words }
    }

    pub fn singleton(e: usize) -> Self {
        let mut s = Self::new();
        s.insert(e);
        s
    }

    /// Builds a set from a bitmask over elements `0..64`.
    pub fn from_mask(mask: u64) -> Self {
        let mut words = SmallVec::new();
        if mask != 0 {
            words.push(mask);
        }
        ElementSet { words }
    }

    /// The low 64 bits as a mask; `None` if the set has an element `>= 64`.
    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, e: usize) -> bool {
        let (w, b) = (e / BITS, e % BITS);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] & (1 << b) != 0;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, e: usize) -> bool {
        let (w, b) = (e / BITS, e % BITS);
        if w >= self.words.len() {
            return false;
        }
        let had = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        self.trim();
        had
    }

    pub fn contains(&self, e: usize) -> bool {
        let (w, b) = (e / BITS, e % BITS);
        w < self.words.len() && self.words[w] & (1 << b) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// One past the largest element, or 0 for the empty set.
    pub fn bound(&self) -> usize {
        match self.words.last() {
            None => 0,
            Some(&w) => (self.words.len() - 1) * BITS + (BITS - w.leading_zeros() as usize),
        }
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { words: &self.words, index: 0, current: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a |= *b;
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut words: SmallVec<[u64; 2]> = self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        ElementSet { words }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= !*b;
        }
        out.trim();
        out
    }

    /// `{0..n} - self`.
    pub fn complement(&self, n: usize) -> Self {
        ElementSet::full(n).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().enumerate().all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(other.words.iter()).all(|(a, b)| a & b == 0)
    }

    pub fn with(&self, e: usize) -> Self {
        let mut out = self.clone();
        out.insert(e);
        out
    }

    pub fn without(&self, e: usize) -> Self {
        let mut out = self.clone();
        out.remove(e);
        out
    }

    /// Image of the set under `map` (element `e` goes to `map[e]`).
    pub fn map_through(&self, map: &[usize]) -> Self {
        self.iter().map(|e| map[e]).collect()
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElementSet::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl Extend<usize> for ElementSet {
    fn extend<I: IntoIterator<Item = usize>>(&mut self, iter: I) {
        for e in iter {
            self.insert(e);
        }
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Ascending iterator over the members of an [`ElementSet`].
pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let b = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * BITS + b);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let mut s = ElementSet::new();
        assert!(s.insert(3));
        assert!(!s.insert(3));
        s.insert(70);
        assert_eq!(s.len(), 2);
        assert_eq!(s.to_vec(), [3, 70]);
        assert_eq!(s.bound(), 71);
        s.remove(70);
        assert_eq!(s, ElementSet::singleton(3));
        assert_eq!(s.to_mask(), Some(8));
        assert_eq!(ElementSet::full(3).complement(5).to_vec(), [3, 4]);
    }

    proptest! {
        #[test]
        fn agrees_with_btreeset(a in proptest::collection::btree_set(0usize..200, 0..40),
                                b in proptest::collection::btree_set(0usize..200, 0..40)) {
            let sa: ElementSet = a.iter().copied().collect();
            let sb: ElementSet = b.iter().copied().collect();
            let union: Vec<usize> = a.union(&b).copied().collect();
            let inter: Vec<usize> = a.intersection(&b).copied().collect();
            let diff: Vec<usize> = a.difference(&b).copied().collect();
            prop_assert_eq!(sa.union(&sb).to_vec(), union);
            prop_assert_eq!(sa.intersection(&sb).to_vec(), inter.clone());
            prop_assert_eq!(sa.difference(&sb).to_vec(), diff);
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.is_disjoint(&sb), inter.is_empty());
            prop_assert_eq!(sa.intersection(&sb) == sb.intersection(&sa), true);
        }
    }
}
