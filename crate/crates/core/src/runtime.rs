//! Step counts of whole pipeline runs on the three machine architectures.
//!
//! The single tape pays quadratic permutations. Two tapes make the stride
//! shuffle `n^{4/3}` and the gather linear, but still run blocks one after
//! another. Periodic head atoms run every block in lockstep and move whole
//! columns at once.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::runtime_exponent;
use crate::cooling::{pipeline, PipelineConfig, PipelineMode, PipelineReport, Shuffle};
use crate::polymer::{two_tape_gather_cost, two_tape_stride, two_tape_stride_ca, ROTATION_PULSES};
use crate::thermal::{sample, BiasModel};
use crate::{icbrt, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    SingleTape,
    TwoTape,
    TwoTapeCa,
}

impl Architecture {
    pub const ALL: [Architecture; 3] = [Architecture::SingleTape, Architecture::TwoTape, Architecture::TwoTapeCa];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::SingleTape => "single",
            Architecture::TwoTape => "two_tape",
            Architecture::TwoTapeCa => "two_tape_ca",
        }
    }

    /// Pipeline mode whose permutation this architecture executes.
    pub fn mode(self) -> PipelineMode {
        match self {
            Architecture::SingleTape => PipelineMode::ShuffledBlocks(Shuffle::Uniform),
            _ => PipelineMode::ShuffledBlocks(Shuffle::Stride),
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" | "single_tape" => Ok(Architecture::SingleTape),
            "two_tape" | "two-tape" => Ok(Architecture::TwoTape),
            "two_tape_ca" | "two-tape-ca" | "ca" => Ok(Architecture::TwoTapeCa),
            _ => Err(Error::InvalidParameter(format!("unknown architecture {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchitectureProfile {
    pub arch: Architecture,
    pub n: usize,
    pub initial_perm: u64,
    pub phases: u64,
    pub travel: u64,
    pub gather: u64,
    pub total: u64,
}

/// Converts a single-tape phase count with `shifts` head moves into pulses
/// on a two-tape polymer, where each move is a six-pulse rotation.
fn rotated(steps: u64, shifts: u64) -> u64 {
    steps - shifts + shifts * ROTATION_PULSES
}

/// Prices one pipeline run on `arch`. The run itself must use
/// `arch.mode()`.
pub fn profile_report(arch: Architecture, report: &PipelineReport, input: &[bool]) -> Result<ArchitectureProfile> {
    if report.mode != arch.mode() {
        return Err(Error::InvalidParameter(format!("{arch} needs a {:?} run", arch.mode())));
    }
    let n = report.n;
    let s = &report.steps;
    let b = icbrt(n);
    let (initial_perm, phases, travel, gather) = match arch {
        Architecture::SingleTape => (s.initial_perm, s.phases, s.travel, s.gather),
        Architecture::TwoTape => (
            two_tape_stride(input, b)?.1,
            rotated(s.phases, s.phase_shifts),
            s.travel * ROTATION_PULSES,
            two_tape_gather_cost(n, &report.segments)?,
        ),
        Architecture::TwoTapeCa => (
            two_tape_stride_ca(input, b)?.1,
            rotated(s.lockstep_phases, s.lockstep_shifts),
            0,
            two_tape_gather_cost(n, &report.segments)?,
        ),
    };
    Ok(ArchitectureProfile { arch, n, initial_perm, phases, travel, gather, total: initial_perm + phases + travel + gather })
}

pub fn profile(arch: Architecture, model: &BiasModel, n: usize, seed: u64) -> Result<ArchitectureProfile> {
    let config = PipelineConfig { mode: arch.mode(), ..PipelineConfig::default() };
    let report = pipeline(model, n, seed, &config)?;
    let input = sample(model, n, seed)?;
    profile_report(arch, &report, &input)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub arch: Architecture,
    pub sizes: Vec<usize>,
    pub steps: Vec<u64>,
    pub slope: f64,
}

pub fn scaling(arch: Architecture, model: &BiasModel, sizes: &[usize], seed: u64) -> Result<ScalingFit> {
    let steps = sizes.iter().map(|&n| profile(arch, model, n, seed).map(|p| p.total)).collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = steps.iter().map(|&s| s as f64).collect();
    let slope = runtime_exponent(&xs, &ys)?;
    Ok(ScalingFit { arch, sizes: sizes.to_vec(), steps, slope })
}

/// `3^6 .. 3^9`.
pub fn default_sizes() -> Vec<usize> {
    (6..=9).map(|e| 3usize.pow(e)).collect()
}
