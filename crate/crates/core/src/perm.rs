//! Permutations of positions, stored as a content map: the content at
//! position `i` moves to position `map[i]`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Validates that `map` is a bijection on `0..map.len()`.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n {
                return Err(Error::InvalidPermutation(format!("image {m} out of range for length {n}")));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPermutation(format!("image {m} appears twice")));
            }
        }
        Ok(Permutation(map))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Where the content of position `i` ends up.
    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &m) in self.0.iter().enumerate() {
            inv[m] = i;
        }
        Permutation(inv)
    }

    /// `self` first, then `next`.
    pub fn then(&self, next: &Permutation) -> Self {
        assert_eq!(self.len(), next.len(), "composing permutations of different lengths");
        Permutation(self.0.iter().map(|&m| next.0[m]).collect())
    }

    /// Moves contents: `out[self(i)] = items[i]`.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(items.len(), self.len(), "permutation length mismatch");
        let mut out = items.to_vec();
        for (i, item) in items.iter().enumerate() {
            out[self.0[i]] = item.clone();
        }
        out
    }

    /// Disjoint-cycle decomposition. Each cycle starts at its smallest
    /// element and follows the content flow; cycles are ordered by that
    /// element. Fixed points appear as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.0[i];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of inversions, i.e. the minimum number of adjacent
    /// transpositions on a line.
    pub fn inversions(&self) -> u64 {
        let mut tree = Fenwick::new(self.len());
        let mut total = 0u64;
        for (seen, &m) in self.0.iter().enumerate() {
            total += (seen as u64) - tree.prefix(m);
            tree.add(m, 1);
        }
        total
    }
}

/// Binary indexed tree over `u64` counts.
#[derive(Debug, Clone)]
pub(crate) struct Fenwick(Vec<u64>);

impl Fenwick {
    pub(crate) fn new(n: usize) -> Self {
        Fenwick(vec![0; n + 1])
    }

    pub(crate) fn add(&mut self, i: usize, v: u64) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    pub(crate) fn sub(&mut self, i: usize, v: u64) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] -= v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over `0..i`.
    pub(crate) fn prefix(&self, i: usize) -> u64 {
        let mut i = i;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}
