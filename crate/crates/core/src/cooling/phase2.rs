use serde::{Deserialize, Serialize};

use super::RoundRecord;
use crate::analysis::{phase2_exact, phase2_stationary, Phase2Region};
use crate::thermal::{mix_seed, permutation_cost, uniform_random_perm};
use crate::{compiler, icbrt, Bit, Error, Result};

/// Largest ones-fraction phase 2 accepts (bias 0.856).
pub const PHASE2_ENTRY_DELTA: f64 = 0.072;

/// Bin size for ones-fraction `delta`.
pub fn choose_k(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta <= PHASE2_ENTRY_DELTA + 1e-9) {
        return Err(Error::InvalidParameter(format!("bin size is defined for 0 < delta <= 0.072, got {delta}")));
    }
    let region = Phase2Region::of(delta).unwrap_or(Phase2Region::First);
    Ok(match region.fixed_k() {
        Some(k) => k,
        // The tolerance keeps exact powers such as 1e-5 -> 100 from rounding up.
        None => (delta.powf(-0.4) - 1e-9).ceil() as usize,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase2Schedule {
    /// Switch to whole-block bins once `k` would exceed `n^alpha`.
    pub alpha: f64,
}

impl Default for Phase2Schedule {
    fn default() -> Self {
        Phase2Schedule { alpha: 0.3 }
    }
}

impl Phase2Schedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.2 && self.alpha <= 0.32) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0.2, 0.32], got {}", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase2Step {
    pub k: usize,
    pub endgame: bool,
    /// Predicted ones-fraction after this round.
    pub delta_pred: f64,
}

/// Analytic schedule from `delta0` for a system of `n` bits: rounds until
/// the predicted ones-fraction falls to `n^-0.3`.
pub fn phase2_plan(delta0: f64, n: usize, schedule: &Phase2Schedule) -> Result<Vec<Phase2Step>> {
    schedule.validate()?;
    let halt = phase2_stationary(n as f64)?.halt;
    let k_cap = (n as f64).powf(schedule.alpha);
    let block = icbrt(n).max(2);
    let mut delta = delta0;
    let mut plan = Vec::new();
    while delta > halt && plan.len() < 64 {
        let mut k = choose_k(delta)?;
        let endgame = k as f64 > k_cap;
        if endgame {
            k = block;
        }
        let next = phase2_exact(delta, k).delta_out;
        plan.push(Phase2Step { k, endgame, delta_pred: next });
        if endgame && next >= delta {
            break;
        }
        delta = next;
    }
    Ok(plan)
}

/// Odd-weight bins are dropped whole; even-weight bins pass `x2..xk`.
pub fn parity_bin(bin: &[Bit]) -> Option<&[Bit]> {
    let odd = bin.iter().fold(false, |acc, &b| acc ^ b);
    (!odd).then(|| &bin[1..])
}

/// One round on consecutive bins of `k`; a trailing partial bin is dropped.
pub fn phase2_round_fixed(bits: &[Bit], k: usize) -> (Vec<Bit>, RoundRecord) {
    assert!(k >= 2, "phase 2 bins need at least 2 bits");
    let mut out = Vec::with_capacity(bits.len());
    let mut singles = 0;
    for bin in bits.chunks_exact(k) {
        if crate::count_ones(bin) == 1 {
            singles += 1;
        }
        if let Some(pass) = parity_bin(bin) {
            out.extend_from_slice(pass);
        }
    }
    let mut rec = RoundRecord::new(2, bits, &out);
    rec.single_one_bins = Some(singles);
    let delta_in = crate::count_ones(bits) as f64 / bits.len().max(1) as f64;
    rec.bias_pred = 1.0 - 2.0 * phase2_exact(delta_in, k).delta_out;
    let cost = compiler::phase2_steps(bits.len(), k);
    rec.steps = cost.total();
    rec.shifts = cost.shifts;
    (out, rec)
}

/// Shuffles with the experimenter's seed, then bins.
pub fn phase2_round(bits: &[Bit], k: usize, seed: u64) -> (Vec<Bit>, RoundRecord) {
    let perm = uniform_random_perm(bits.len(), seed);
    let shuffled = perm.apply(bits);
    let (out, mut rec) = phase2_round_fixed(&shuffled, k);
    let shuffle = permutation_cost(&perm);
    rec.steps += shuffle.steps;
    rec.shifts += shuffle.steps - shuffle.transpositions;
    (out, rec)
}

pub fn phase2_apply(mut bits: Vec<Bit>, plan: &[Phase2Step], seed: u64) -> (Vec<Bit>, Vec<RoundRecord>) {
    let mut records = Vec::with_capacity(plan.len());
    for (round, step) in plan.iter().enumerate() {
        let (out, mut rec) = phase2_round(&bits, step.k, mix_seed(seed, round as u64));
        rec.round = round;
        rec.bias_pred = 1.0 - 2.0 * step.delta_pred;
        records.push(rec);
        bits = out;
    }
    (bits, records)
}

pub fn phase2_run(
    bits: Vec<Bit>,
    delta0: f64,
    n: usize,
    schedule: &Phase2Schedule,
    seed: u64,
) -> Result<(Vec<Bit>, Vec<RoundRecord>)> {
    let plan = phase2_plan(delta0, n, schedule)?;
    Ok(phase2_apply(bits, &plan, seed))
}
