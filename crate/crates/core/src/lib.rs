//! Classical simulation of a bulk-NMR ensemble computer and the three-phase
//! state-initialisation ("algorithmic cooling") procedure that runs on it.
//!
//! The crate is organised around the layers of the construction:
//!
//! * [`machine`] is the abstract cyclic-tape computer with its four
//!   primitives and a two-bit register carried by the head.
//! * [`polymer`] models the periodic polymers that realise those primitives
//!   with global resonant pulses, plus a two-tape machine used for cost
//!   accounting.
//! * [`thermal`] samples biased initial states and builds the initial and
//!   terminal permutations.
//! * [`cooling`] runs the three phases on bit vectors and assembles the full
//!   pipeline.
//! * [`compiler`] lowers each phase round to an oblivious machine program and
//!   checks it against the bit-vector semantics.
//! * [`analysis`] holds the recurrences, bounds, yield ledger and scaling fits.
//! * [`runtime`] assembles step-count profiles for the three architectures.

pub mod analysis;
pub mod compiler;
pub mod cooling;
mod error;
pub mod machine;
pub mod perm;
pub mod polymer;
pub mod runtime;
pub mod thermal;

pub use error::{Error, Result};
pub use machine::{Cursor, Direction, Emitter, MachineProgram, Primitive, RegisterBit, ReversibleGate, StepCounter, TapeState};
pub use perm::Permutation;

/// Bits are stored as `bool`, `true` meaning a 1 (spin against the field).
pub type Bit = bool;

/// Number of ones in a bit slice.
pub fn count_ones(bits: &[Bit]) -> u64 {
    bits.iter().filter(|&&b| b).count() as u64
}

/// Integer cube root: the largest `r` with `r^3 <= n`.
pub fn icbrt(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).cbrt().round() as usize;
    while r * r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Formats bits as a string of `0`/`1` characters.
pub fn bits_to_string(bits: &[Bit]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a string of `0`/`1` characters, ignoring whitespace.
pub fn bits_from_str(s: &str) -> Result<Vec<Bit>> {
    s.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidParameter(format!("unexpected character {other:?} in bit string"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_roots() {
        assert_eq!(icbrt(0), 0);
        assert_eq!(icbrt(1), 1);
        assert_eq!(icbrt(7), 1);
        assert_eq!(icbrt(8), 2);
        assert_eq!(icbrt(26), 2);
        assert_eq!(icbrt(27), 3);
        assert_eq!(icbrt(1_000_000), 100);
        assert_eq!(icbrt(2187), 12);
        assert_eq!(icbrt(19683), 27);
    }

    #[test]
    fn bit_strings() {
        let bits = bits_from_str("01 10").unwrap();
        assert_eq!(bits, vec![false, true, true, false]);
        assert_eq!(bits_to_string(&bits), "0110");
        assert!(bits_from_str("012").is_err());
    }
}
