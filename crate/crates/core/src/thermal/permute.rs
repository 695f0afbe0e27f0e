use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::machine::{Cursor, Emitter, ReversibleGate, StepCounter, TapeState};
use crate::perm::{Fenwick, Permutation};
use crate::{icbrt, Error, Result};

/// Stride shuffle on a cube `n = m^3`: index `r m + s` (with `s < m`) goes
/// to `((r + s) mod m^2) m + s`.
pub fn stride_shuffle_perm(n: usize) -> Result<Permutation> {
    let m = icbrt(n);
    if m * m * m != n || n == 0 {
        return Err(Error::NotCube(n));
    }
    block_stride_perm(n, m)
}

/// The stride shuffle generalised to blocks of `b` over the first
/// `floor(n/b) b` cells; any remainder stays in place.
pub fn block_stride_perm(n: usize, b: usize) -> Result<Permutation> {
    if b == 0 || b > n {
        return Err(Error::InvalidParameter(format!("block size {b} does not fit {n} cells")));
    }
    let blocks = n / b;
    let map = (0..n)
        .map(|i| {
            if i >= blocks * b {
                return i;
            }
            let (r, s) = (i / b, i % b);
            ((r + s) % blocks) * b + s
        })
        .collect();
    Permutation::new(map)
}

pub fn uniform_random_perm(n: usize, seed: u64) -> Permutation {
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Permutation::new(map).expect("a shuffle is a permutation")
}

/// Moves every clean segment `(start, len)` to the front, in order; all
/// other cells follow in their original order.
pub fn gather_permutation(n: usize, segments: &[(usize, usize)]) -> Result<Permutation> {
    let mut clean = vec![false; n];
    for &(start, len) in segments {
        if start + len > n {
            return Err(Error::InvalidParameter(format!("segment {start}+{len} exceeds {n} cells")));
        }
        clean[start..start + len].iter_mut().for_each(|c| *c = true);
    }
    let mut map = vec![0; n];
    let mut next = 0;
    for (i, _) in clean.iter().enumerate().filter(|(_, &c)| c) {
        map[i] = next;
        next += 1;
    }
    for (i, _) in clean.iter().enumerate().filter(|(_, &c)| !c) {
        map[i] = next;
        next += 1;
    }
    Permutation::new(map)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermCost {
    /// Adjacent transpositions applied at the head.
    pub transpositions: u64,
    /// All primitive steps, head moves included.
    pub steps: u64,
}

/// Emits a selection sort by adjacent head swaps: for each target cell `j`,
/// the content destined for `j` is bubbled down from its current position.
/// The head starts and ends at cell 0.
pub fn emit_permutation<E: Emitter>(emitter: E, perm: &Permutation) -> E {
    let n = perm.len();
    let inv = perm.inverse();
    // Unplaced contents keep their relative order, so the current position
    // of an unplaced original index x is j + #(unplaced indices below x).
    let mut unplaced = Fenwick::new(n);
    for i in 0..n {
        unplaced.add(i, 1);
    }
    let mut cursor = Cursor::new(emitter);
    let swap = ReversibleGate::swap();
    for j in 0..n {
        let src = inv.image(j);
        let p = j + unplaced.prefix(src) as usize;
        unplaced.sub(src, 1);
        if p > j {
            cursor.sweep(p - 1, j, swap);
        }
    }
    cursor.finish()
}

pub fn permutation_cost(perm: &Permutation) -> PermCost {
    let c = emit_permutation(StepCounter::default(), perm);
    PermCost { transpositions: c.ops, steps: c.total() }
}

/// Realises `perm` (a content map on logical cells) on the machine.
pub fn apply_perm_as_transpositions(state: &mut TapeState, perm: &Permutation) -> Result<PermCost> {
    if perm.len() != state.len() {
        return Err(Error::InvalidPermutation(format!("length {} on a tape of {}", perm.len(), state.len())));
    }
    if state.head() != 0 {
        return Err(Error::InvalidParameter("permutations are applied from head position 0".into()));
    }
    let before = state.steps();
    emit_permutation(&mut *state, perm);
    let cost = permutation_cost(perm);
    debug_assert_eq!(state.steps() - before, cost.steps);
    Ok(cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stride_by_hand() {
        let p = stride_shuffle_perm(8).unwrap();
        assert_eq!(&p.as_slice()[..4], &[0, 3, 2, 5]);
        assert!(stride_shuffle_perm(9).is_err());
        for n in [8, 27, 1000] {
            let p = stride_shuffle_perm(n).unwrap();
            let mut img = p.as_slice().to_vec();
            img.sort_unstable();
            assert_eq!(img, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn stride_separates_block_mates() {
        let p = stride_shuffle_perm(27).unwrap();
        for block in 0..9 {
            let mut dest: Vec<usize> = (0..3).map(|s| p.image(block * 3 + s) / 3).collect();
            dest.sort_unstable();
            dest.dedup();
            assert_eq!(dest.len(), 3);
        }
    }

    #[test]
    fn uniform_is_uniform() {
        let mut counts = std::collections::HashMap::new();
        for seed in 0..60_000 {
            *counts.entry(uniform_random_perm(3, seed).as_slice().to_vec()).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 6);
        for c in counts.values() {
            assert!((*c as i64 - 10_000).abs() <= 400, "{c}");
        }
        assert!(uniform_random_perm(1, 4).is_identity());
    }

    #[test]
    fn identity_costs_nothing() {
        let c = permutation_cost(&Permutation::identity(50));
        assert_eq!(c, PermCost { transpositions: 0, steps: 0 });
        let swap01 = Permutation::new(vec![1, 0, 2, 3]).unwrap();
        assert_eq!(permutation_cost(&swap01), PermCost { transpositions: 1, steps: 1 });
    }

    #[test]
    fn quadratic_cost() {
        for n in [27usize, 81, 243, 729] {
            let c = permutation_cost(&uniform_random_perm(n, n as u64));
            let ratio = c.steps as f64 / (n * n) as f64;
            assert!(ratio < 1.0, "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn gather_packs_segments() {
        let p = gather_permutation(6, &[(0, 2), (3, 1)]).unwrap();
        let items = ['a', 'b', 'x', 'c', 'y', 'z'];
        assert_eq!(p.apply(&items), vec!['a', 'b', 'c', 'x', 'y', 'z']);
        for n in [27usize, 81, 243, 729] {
            let b = icbrt(n);
            let segs: Vec<_> = (0..n / b).map(|i| (i * b, b / 2)).collect();
            let c = permutation_cost(&gather_permutation(n, &segs).unwrap());
            assert!((c.steps as f64) < (n * n) as f64);
        }
    }

    proptest! {
        #[test]
        fn machine_realises_permutation(bits in prop::collection::vec(any::<bool>(), 1..40), seed in any::<u64>()) {
            let perm = uniform_random_perm(bits.len(), seed);
            let mut tape = TapeState::new(bits.clone()).unwrap();
            let cost = apply_perm_as_transpositions(&mut tape, &perm).unwrap();
            prop_assert_eq!(tape.logical(), perm.apply(&bits));
            prop_assert_eq!(tape.head(), 0);
            prop_assert_eq!(cost.transpositions, perm.inversions());
            prop_assert_eq!(tape.steps(), cost.steps);
        }
    }
}
