use serde::{Deserialize, Serialize};

use super::{
    phase1_apply, phase2_apply, phase2_plan, phase3_apply, phase3_k, phase3_plan, Phase1Config, Phase2Schedule, Phase2Step,
    RoundRecord,
};
use crate::analysis::{delta_of, forward_orbit, yield_ledger, PhaseLoss, YieldLedger};
use crate::perm::Permutation;
use crate::thermal::{
    block_stride_perm, gather_permutation, mix_seed, permutation_cost, sample, uniform_random_perm, BiasModel,
};
use crate::{count_ones, icbrt, Bit, Error, Result};

/// Stream id for the initial permutation's seed.
const PERM_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shuffle {
    Stride,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineMode {
    /// Independent input bits: no initial permutation, one region.
    BinomialDirect,
    /// Permute, then confine every phase to blocks of `floor(n^(1/3))`.
    ShuffledBlocks(Shuffle),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mode: PipelineMode,
    pub phase1: Phase1Config,
    pub schedule: Phase2Schedule,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { mode: PipelineMode::BinomialDirect, phase1: Phase1Config::default(), schedule: Phase2Schedule::default() }
    }
}

/// Round schedule fixed in advance from `epsilon` and `n` alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub epsilon: f64,
    pub n: usize,
    pub phase1_orbit: Vec<f64>,
    pub phase2: Vec<Phase2Step>,
    pub phase3_k: usize,
    pub phase3: Vec<f64>,
}

impl Plan {
    pub fn new(epsilon: f64, n: usize, config: &PipelineConfig) -> Result<Self> {
        let mut phase1_orbit = forward_orbit(epsilon, config.phase1.target_bias)?;
        if let Some(r) = config.phase1.rounds {
            phase1_orbit.truncate(r + 1);
            while phase1_orbit.len() < r + 1 {
                phase1_orbit.push(crate::analysis::bias_forward(*phase1_orbit.last().unwrap()));
            }
        }
        let delta1 = delta_of(*phase1_orbit.last().unwrap()).max(0.0);
        let phase2 = if delta1 > 0.0 { phase2_plan(delta1.min(super::PHASE2_ENTRY_DELTA), n, &config.schedule)? } else { Vec::new() };
        let delta2 = phase2.last().map_or(delta1, |s| s.delta_pred);
        let k3 = phase3_k(n);
        Ok(Plan { epsilon, n, phase1_orbit, phase2, phase3_k: k3, phase3: phase3_plan(delta2, n, k3) })
    }
}

/// Step totals of one pipeline run on the single-tape machine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepProfile {
    pub initial_perm: u64,
    /// Phase programs summed over all blocks and rounds.
    pub phases: u64,
    /// Head moves included in `phases`.
    pub phase_shifts: u64,
    /// Per round, the most expensive block, summed over rounds.
    pub lockstep_phases: u64,
    pub lockstep_shifts: u64,
    /// Head travel between consecutive blocks.
    pub travel: u64,
    pub gather: u64,
    pub total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub n: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub mode: PipelineMode,
    pub block_size: usize,
    pub blocks: usize,
    pub clean_bits: u64,
    pub ones_in_output: u64,
    pub plan: Plan,
    pub records: Vec<RoundRecord>,
    pub ledger: YieldLedger,
    pub steps: StepProfile,
    /// Where each region's clean bits sat before gathering, as (start, len).
    #[serde(skip)]
    pub segments: Vec<(usize, usize)>,
    #[serde(skip)]
    pub output: Vec<Bit>,
}

/// Splits into consecutive blocks of `floor(len^(1/3))`; the last block may
/// be shorter.
pub fn block_partition(bits: &[Bit]) -> Vec<&[Bit]> {
    if bits.is_empty() {
        return Vec::new();
    }
    bits.chunks(icbrt(bits.len())).collect()
}

pub fn gather(blocks: &[Vec<Bit>]) -> Vec<Bit> {
    blocks.concat()
}

/// Initial permutation for a mode, if any.
pub fn initial_permutation(mode: PipelineMode, n: usize, seed: u64) -> Result<Option<Permutation>> {
    Ok(match mode {
        PipelineMode::BinomialDirect => None,
        PipelineMode::ShuffledBlocks(Shuffle::Stride) => Some(block_stride_perm(n, icbrt(n))?),
        PipelineMode::ShuffledBlocks(Shuffle::Uniform) => Some(uniform_random_perm(n, mix_seed(seed, PERM_STREAM))),
    })
}

struct RegionRun {
    clean: Vec<Bit>,
    records: Vec<RoundRecord>,
}

fn run_region(bits: Vec<Bit>, plan: &Plan, seed: u64) -> RegionRun {
    let (bits, mut records) = phase1_apply(bits, &plan.phase1_orbit);
    let (bits, r2) = phase2_apply(bits, &plan.phase2, seed);
    let (clean, r3) = phase3_apply(bits, plan.phase3_k, &plan.phase3);
    records.extend(r2);
    records.extend(r3);
    RegionRun { clean, records }
}

pub fn pipeline(model: &BiasModel, n: usize, seed: u64, config: &PipelineConfig) -> Result<PipelineReport> {
    let bits = sample(model, n, seed)?;
    pipeline_on(bits, model.epsilon(), seed, config)
}

/// Runs the pipeline on given input bits assumed to have bias `epsilon`.
pub fn pipeline_on(bits: Vec<Bit>, epsilon: f64, seed: u64, config: &PipelineConfig) -> Result<PipelineReport> {
    let n = bits.len();
    if n < 8 {
        return Err(Error::InvalidParameter(format!("pipeline needs at least 8 bits, got {n}")));
    }
    config.schedule.validate()?;
    let plan = Plan::new(epsilon, n, config)?;
    let mut steps = StepProfile::default();

    let bits = match initial_permutation(config.mode, n, seed)? {
        Some(perm) => {
            steps.initial_perm = permutation_cost(&perm).steps;
            perm.apply(&bits)
        }
        None => bits,
    };

    let regions: Vec<(usize, &[Bit])> = match config.mode {
        PipelineMode::BinomialDirect => vec![(0, &bits[..])],
        PipelineMode::ShuffledBlocks(_) => {
            let b = icbrt(n);
            block_partition(&bits).into_iter().enumerate().map(|(i, blk)| (i * b, blk)).collect()
        }
    };
    let block_size = regions[0].1.len();

    let mut records: Vec<RoundRecord> = Vec::new();
    let mut lockstep = Vec::new();
    let mut segments = Vec::with_capacity(regions.len());
    let mut output = Vec::new();
    for (i, &(start, region)) in regions.iter().enumerate() {
        let run = run_region(region.to_vec(), &plan, mix_seed(seed, i as u64));
        if records.is_empty() {
            lockstep = run.records.iter().map(|r| (r.steps, r.shifts)).collect();
            records = run.records;
        } else {
            for ((acc, r), ls) in records.iter_mut().zip(&run.records).zip(lockstep.iter_mut()) {
                acc.merge(r);
                if r.steps > ls.0 {
                    *ls = (r.steps, r.shifts);
                }
            }
        }
        segments.push((start, run.clean.len()));
        output.extend(run.clean);
    }

    steps.phases = records.iter().map(|r| r.steps).sum();
    steps.phase_shifts = records.iter().map(|r| r.shifts).sum();
    steps.lockstep_phases = lockstep.iter().map(|l| l.0).sum();
    steps.lockstep_shifts = lockstep.iter().map(|l| l.1).sum();
    // Each round sweeps the head across every block once.
    steps.travel = if regions.len() > 1 { (records.len() * n) as u64 } else { 0 };
    steps.gather = permutation_cost(&gather_permutation(n, &segments)?).steps;
    steps.total = steps.initial_perm + steps.phases + steps.travel + steps.gather;

    let clean_bits = output.len() as u64;
    let phase_losses = (1..=3u8)
        .map(|p| {
            let first = records.iter().find(|r| r.phase == p);
            let last = records.iter().rev().find(|r| r.phase == p);
            let entering = records.iter().rev().find(|r| r.phase < p).map_or(n as u64, |r| r.n_out);
            match (first, last) {
                (Some(f), Some(l)) => PhaseLoss::new(format!("phase{p}"), f.n_in, l.n_out),
                _ => PhaseLoss::new(format!("phase{p}"), entering, entering),
            }
        })
        .collect();
    let ledger = yield_ledger(epsilon, n as u64, clean_bits).with_phases(phase_losses);

    Ok(PipelineReport {
        n,
        epsilon,
        seed,
        mode: config.mode,
        block_size,
        blocks: regions.len(),
        clean_bits,
        ones_in_output: count_ones(&output),
        plan,
        records,
        ledger,
        steps,
        segments,
        output,
    })
}
