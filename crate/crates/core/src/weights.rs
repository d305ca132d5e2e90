use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::ElementSet;

/// Non-negative element weights, one per ground-set element.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Weighting(Vec<f64>);

impl Weighting {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w >= 0.0)) {
            return Err(invalid(alloc::format!("weight of element {i} is {w}; weights must be finite and >= 0")));
        }
        Ok(Weighting(weights))
    }

    pub fn zeros(n: usize) -> Self {
        Weighting(alloc::vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: usize) -> f64 {
        self.0[e]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `w(X)`.
    pub fn of(&self, set: &ElementSet) -> f64 {
        set.iter().map(|e| self.0[e]).sum()
    }

    /// Weights pulled back along `map` (local element `i` gets `self[map[i]]`).
    pub fn pull_back(&self, map: &[usize]) -> Weighting {
        Weighting(map.iter().map(|&e| self.0[e]).collect())
    }

    /// Copy with every element outside `keep` set to zero.
    pub fn zeroed_outside(&self, keep: &ElementSet) -> Weighting {
        Weighting(self.0.iter().enumerate().map(|(i, &w)| if keep.contains(i) { w } else { 0.0 }).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_nan() {
        assert!(Weighting::new(alloc::vec![1.0, -0.5]).is_err());
        assert!(Weighting::new(alloc::vec![f64::NAN]).is_err());
        let w = Weighting::new(alloc::vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        assert_eq!(w.of(&[0, 2].into_iter().collect()), 6.0);
        assert_eq!(w.pull_back(&[3, 1]).as_slice(), &[1.0, 3.0]);
    }
}
