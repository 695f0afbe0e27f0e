use super::RoundRecord;
use crate::analysis::phase3_exact;
use crate::{compiler, Bit, Result};

/// Block size `max(4, round(n^(1/6)))`.
pub fn phase3_k(n: usize) -> usize {
    ((n as f64).powf(1.0 / 6.0).round() as usize).max(4)
}

/// A block passes its last `k-3` bits iff its weight is divisible by 4.
pub fn phase3_block_passes(block: &[Bit]) -> bool {
    crate::count_ones(block).is_multiple_of(4)
}

pub fn phase3_round(bits: &[Bit], k: usize) -> (Vec<Bit>, RoundRecord) {
    assert!(k >= 4, "phase 3 blocks need at least 4 bits");
    let mut out = Vec::with_capacity(bits.len());
    for block in bits.chunks_exact(k) {
        if phase3_block_passes(block) {
            out.extend_from_slice(&block[3..]);
        }
    }
    let mut rec = RoundRecord::new(3, bits, &out);
    let delta_in = crate::count_ones(bits) as f64 / bits.len().max(1) as f64;
    rec.bias_pred = 1.0 - 2.0 * phase3_exact(delta_in, k).delta_out;
    let cost = compiler::phase3_steps(bits.len(), k);
    rec.steps = cost.total();
    rec.shifts = cost.shifts;
    (out, rec)
}

/// Predicted ones-fraction after each round until it falls below `n^-10`.
pub fn phase3_plan(delta0: f64, n: usize, k: usize) -> Vec<f64> {
    let target = (n as f64).powf(-10.0);
    let mut delta = delta0;
    let mut plan = Vec::new();
    while delta >= target && delta > 0.0 && plan.len() < 64 {
        delta = phase3_exact(delta, k).delta_out;
        plan.push(delta);
    }
    plan
}

pub fn phase3_apply(mut bits: Vec<Bit>, k: usize, plan: &[f64]) -> (Vec<Bit>, Vec<RoundRecord>) {
    let mut records = Vec::with_capacity(plan.len());
    for (round, &delta) in plan.iter().enumerate() {
        let (out, mut rec) = phase3_round(&bits, k);
        rec.round = round;
        rec.bias_pred = 1.0 - 2.0 * delta;
        records.push(rec);
        bits = out;
    }
    (bits, records)
}

pub fn phase3_run(bits: Vec<Bit>, delta0: f64, n: usize) -> Result<(Vec<Bit>, Vec<RoundRecord>)> {
    let k = phase3_k(n);
    let plan = phase3_plan(delta0, n, k);
    Ok(phase3_apply(bits, k, &plan))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_rule() {
        let (out, _) = phase3_round(&[false; 10], 10);
        assert_eq!(out, vec![false; 7]);
        let mut one = [false; 10];
        one[6] = true;
        assert!(phase3_round(&one, 10).0.is_empty());
        let mut four = [false; 10];
        for i in [3, 5, 7, 9] {
            four[i] = true;
        }
        let (out, rec) = phase3_round(&four, 10);
        assert_eq!(out.len(), 7);
        assert_eq!(rec.ones_out, 4);
    }

    #[test]
    fn block_size() {
        assert_eq!(phase3_k(1_000_000), 10);
        assert_eq!(phase3_k(729), 4);
    }

    #[test]
    fn clean_input_loses_only_headers() {
        let n = 1_000_000;
        let (out, recs) = phase3_run(vec![false; 1000], (n as f64).powf(-0.3), n).unwrap();
        assert!(!recs.is_empty() && recs.len() <= 6);
        assert!(out.iter().all(|b| !b));
        let expected = recs.iter().fold(1000, |len, _| len / 10 * 7);
        assert_eq!(out.len(), expected);
    }
}
