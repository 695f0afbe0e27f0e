use spinref_core::compiler::{
    compile_phase1, compile_phase2_round, compile_phase3_round, equivalence_check, equivalence_check_with, CheckMode,
};
use spinref_core::cooling::{pair_survivors, parity_bin, phase3_block_passes};
use spinref_core::{MachineProgram, TapeState};

fn phase2_ref(k: usize) -> impl Fn(&[bool]) -> Vec<bool> {
    move |b| b.chunks_exact(k).filter_map(parity_bin).flatten().copied().collect()
}

#[test]
fn phase1_exhaustive_and_sampled() {
    let r = equivalence_check(&compile_phase1(8).unwrap(), pair_survivors, 8);
    assert_eq!((r.mode.as_str(), r.cases, r.mismatches), ("exhaustive", 256, 0));
    let r = equivalence_check(&compile_phase1(64).unwrap(), pair_survivors, 64);
    assert_eq!((r.mode.as_str(), r.cases, r.mismatches), ("sampled", 1000, 0));
}

#[test]
fn phase2_small_grids() {
    let r = equivalence_check(&compile_phase2_round(12, 3).unwrap(), phase2_ref(3), 12);
    assert_eq!((r.cases, r.mismatches), (4096, 0));
    for (n, k) in [(10, 2), (14, 7), (13, 4), (16, 5)] {
        let r = equivalence_check(&compile_phase2_round(n, k).unwrap(), phase2_ref(k), n);
        assert!(r.agrees(), "n={n} k={k}: {:?}", r.witness);
    }
}

#[test]
fn phase3_on_clean_decision_cells() {
    for (n, k) in [(8, 4), (12, 6), (16, 8), (14, 7)] {
        let program = compile_phase3_round(n, k).unwrap();
        let oracle = move |b: &[bool]| -> Vec<bool> {
            b.chunks_exact(k).filter(|c| phase3_block_passes(c)).flat_map(|c| c[3..].to_vec()).collect()
        };
        let r = equivalence_check_with(&program, oracle, n, CheckMode::Exhaustive, |b| {
            b.chunks_exact(k).all(|c| !c[2])
        });
        assert!(r.agrees(), "n={n} k={k}: {:?}", r.witness);
        assert_eq!(r.cases, 1 << (n - n / k));
    }
}

#[test]
fn programs_survive_text_round_trip() {
    for program in [compile_phase1(9).unwrap(), compile_phase2_round(12, 4).unwrap(), compile_phase3_round(10, 5).unwrap()] {
        let back = MachineProgram::parse(&program.to_text()).unwrap();
        assert_eq!(back, program);
    }
}

#[test]
fn traces_are_oblivious() {
    let program = compile_phase2_round(9, 3).unwrap();
    let heads = |input: &str| {
        let mut t = TapeState::new(spinref_core::bits_from_str(input).unwrap()).unwrap();
        t.run_traced(&program.ops).unwrap()
    };
    assert_eq!(heads("000000000"), heads("101100111"));
}
