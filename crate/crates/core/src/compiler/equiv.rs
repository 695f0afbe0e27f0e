use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::machine::{MachineProgram, TapeState};
use crate::{bits_to_string, Bit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive,
    Sampled { cases: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// `exhaustive` or `sampled`.
    pub mode: String,
    pub cases: u64,
    pub mismatches: u64,
    /// First disagreeing input, as a 0/1 string.
    pub witness: Option<String>,
}

impl EquivalenceReport {
    pub fn agrees(&self) -> bool {
        self.mismatches == 0
    }
}

/// Runs `program` from a clear register and compares the first
/// `expected.len()` cells with `abstract_fn`'s output. The program must also
/// return the head to 0 and leave the register clear.
fn agrees(program: &MachineProgram, abstract_fn: &dyn Fn(&[Bit]) -> Vec<Bit>, input: &[Bit]) -> bool {
    let expected = abstract_fn(input);
    let mut tape = match TapeState::new(input.to_vec()) {
        Ok(t) => t,
        Err(_) => return expected.is_empty(),
    };
    if tape.run(&program.ops).is_err() {
        return false;
    }
    let out = tape.logical();
    tape.head() == 0 && tape.register() == [false, false] && out.len() >= expected.len() && out[..expected.len()] == expected[..]
}

/// Exhaustive for `width <= 16`, otherwise 1000 seeded samples.
pub fn equivalence_check(
    program: &MachineProgram,
    abstract_fn: impl Fn(&[Bit]) -> Vec<Bit>,
    width: usize,
) -> EquivalenceReport {
    let mode = if width <= 16 { CheckMode::Exhaustive } else { CheckMode::Sampled { cases: 1000, seed: 0 } };
    equivalence_check_with(program, abstract_fn, width, mode, |_| true)
}

/// Checks only inputs accepted by `filter`; rejected inputs are not counted.
pub fn equivalence_check_with(
    program: &MachineProgram,
    abstract_fn: impl Fn(&[Bit]) -> Vec<Bit>,
    width: usize,
    mode: CheckMode,
    filter: impl Fn(&[Bit]) -> bool,
) -> EquivalenceReport {
    let mut report = EquivalenceReport { mode: String::new(), cases: 0, mismatches: 0, witness: None };
    let mut check = |input: &[Bit]| {
        if !filter(input) {
            return;
        }
        report.cases += 1;
        if !agrees(program, &abstract_fn, input) {
            report.mismatches += 1;
            report.witness.get_or_insert_with(|| bits_to_string(input));
        }
    };
    match mode {
        CheckMode::Exhaustive => {
            assert!(width <= 24, "exhaustive check over {width} bits is too large");
            let mut input = vec![false; width];
            for x in 0u64..(1 << width) {
                for (i, b) in input.iter_mut().enumerate() {
                    *b = x >> i & 1 == 1;
                }
                check(&input);
            }
        }
        CheckMode::Sampled { cases, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..cases {
                let input: Vec<Bit> = (0..width).map(|_| rng.random()).collect();
                check(&input);
            }
        }
    }
    report.mode = match mode {
        CheckMode::Exhaustive => "exhaustive",
        CheckMode::Sampled { .. } => "sampled",
    }
    .into();
    report
}
