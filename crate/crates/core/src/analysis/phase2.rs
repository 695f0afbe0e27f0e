use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase2Bounds {
    /// Bits passed from all-zero bins alone.
    pub n1_lower: f64,
    /// Ones that can survive once bins holding a single 1 are discarded.
    pub b1_upper: f64,
    /// Expected number of bins holding exactly one 1.
    pub u_expected: f64,
}

pub fn phase2_bounds(n0: f64, b0: f64, k: usize) -> Result<Phase2Bounds> {
    if k < 2 || !(n0 > 0.0) || !(0.0..=n0).contains(&b0) {
        return Err(Error::InvalidParameter(format!("phase 2 bounds need k >= 2 and 0 <= b0 <= n0 (k={k}, n0={n0}, b0={b0})")));
    }
    let delta = b0 / n0;
    let kf = k as f64;
    let keep = (1.0 - delta).powi(k as i32 - 1);
    Ok(Phase2Bounds {
        n1_lower: n0 / kf * (1.0 - delta).powi(k as i32) * (kf - 1.0),
        b1_upper: b0 * (1.0 - keep),
        u_expected: b0 * keep,
    })
}

/// `b1_upper / n1_lower` per unit `n0`: the bound on the next ones-fraction.
pub fn delta1_bound(delta: f64, k: usize) -> f64 {
    let kf = k as f64;
    delta * kf * -(((kf - 1.0) * (-delta).ln_1p()).exp_m1()) / ((1.0 - delta).powi(k as i32) * (kf - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase2Region {
    /// `0.0188 < delta <= 0.072`, bins of 3.
    First,
    /// `0.0027 < delta <= 0.0188`, bins of 7.
    Second,
    /// `0.000158 < delta <= 0.0027`, bins of 21.
    Third,
    /// `delta <= 0.000158`, bins of `delta^-0.4`.
    Fourth,
}

impl Phase2Region {
    pub const ALL: [Phase2Region; 4] = [Phase2Region::First, Phase2Region::Second, Phase2Region::Third, Phase2Region::Fourth];

    /// `(lower, upper]` delta range.
    pub fn range(self) -> (f64, f64) {
        match self {
            Phase2Region::First => (0.0188, 0.072),
            Phase2Region::Second => (0.0027, 0.0188),
            Phase2Region::Third => (0.000158, 0.0027),
            Phase2Region::Fourth => (0.0, 0.000158),
        }
    }

    pub fn of(delta: f64) -> Option<Self> {
        Self::ALL.into_iter().find(|r| {
            let (lo, hi) = r.range();
            delta > lo && delta <= hi
        })
    }

    /// Fixed bin size for the first three regions.
    pub fn fixed_k(self) -> Option<usize> {
        match self {
            Phase2Region::First => Some(3),
            Phase2Region::Second => Some(7),
            Phase2Region::Third => Some(21),
            Phase2Region::Fourth => None,
        }
    }
}

/// Guaranteed `n1/n0` per region; for the fourth region, the cumulative
/// guarantee over all its rounds.
pub fn phase2_region_floor(region: Phase2Region) -> f64 {
    match region {
        Phase2Region::First => 0.532,
        Phase2Region::Second => 0.75,
        Phase2Region::Third => 0.899,
        Phase2Region::Fourth => 0.96,
    }
}

/// Minimum over a grid of the region of the all-zero-bin pass fraction
/// `(k-1)/k (1-delta)^k`, for the three fixed-k regions.
pub fn region_floor_at_worst(region: Phase2Region) -> Option<f64> {
    let k = region.fixed_k()?;
    let (lo, hi) = region.range();
    let grid = 10_000;
    let floor = (1..=grid)
        .map(|i| lo + (hi - lo) * i as f64 / grid as f64)
        .map(|d| phase2_bounds(1.0, d, k).unwrap().n1_lower)
        .fold(f64::INFINITY, f64::min);
    Some(floor)
}

/// Cumulative fourth-region pass fraction along the worst-case chain
/// starting at the region's upper edge, with `k = ceil(delta^-0.4)`.
///
/// Returns `(bound_chain, exponential_chain)`: the first multiplies the
/// all-zero-bin fractions while stepping `delta <- delta1_bound`; the second
/// multiplies `exp(-1.1 delta^0.4)` while stepping `delta <- 1.2 delta^1.6`.
pub fn region_four_cumulative() -> (f64, f64) {
    let start = Phase2Region::Fourth.range().1;
    let mut bound = 1.0;
    let mut delta = start;
    while delta > 1e-40 {
        let k = (delta.powf(-0.4) - 1e-9).ceil() as usize;
        bound *= phase2_bounds(1.0, delta, k).unwrap().n1_lower;
        delta = delta1_bound(delta, k);
    }
    let mut exponential = 1.0;
    let mut delta = start;
    while delta > 1e-40 {
        exponential *= (-1.1 * delta.powf(0.4)).exp();
        delta = 1.2 * delta.powf(1.6);
    }
    (bound, exponential)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stationary {
    /// Fixed point of `delta1 = delta0^2 k` with `k = n^(1/3)`.
    pub fixed_point: f64,
    /// Phase 2 halts once delta falls to this value.
    pub halt: f64,
}

pub fn phase2_stationary(n: f64) -> Result<Stationary> {
    if !(n >= 2.0) {
        return Err(Error::InvalidParameter(format!("stationary point needs n >= 2, got {n}")));
    }
    Ok(Stationary { fixed_point: n.powf(-1.0 / 3.0), halt: n.powf(-0.3) })
}

/// Expected behaviour of one round on independent bits of ones-fraction
/// `delta_in`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundPrediction {
    /// Expected output bits per input bit.
    pub pass_fraction: f64,
    /// Expected ones-fraction among the output bits.
    pub delta_out: f64,
}

/// For `K` independent bits with `P(1) = delta`, returns
/// `(P(even weight), E[weight; even], E[weight; odd])`.
pub fn even_weight_expectations(big_k: usize, delta: f64) -> (f64, f64, f64) {
    // (1 - 2 delta)^m computed as exp(m ln(1 - 2 delta)) keeps the small-delta
    // differences exact.
    let pow_m1 = |m: usize| if m == 0 { 0.0 } else { (m as f64 * (-2.0 * delta).ln_1p()).exp_m1() };
    let p_even = 1.0 + pow_m1(big_k) / 2.0;
    if big_k == 0 {
        return (1.0, 0.0, 0.0);
    }
    let mean = big_k as f64 * delta;
    // E[w; w even] = K delta P(Bin(K-1) odd).
    let e_even = mean * -pow_m1(big_k - 1) / 2.0;
    let e_odd = mean * (1.0 + pow_m1(big_k - 1) / 2.0);
    (p_even, e_even, e_odd)
}

/// Exact expectation of a parity-binning round with bins of `k`.
pub fn phase2_exact(delta: f64, k: usize) -> RoundPrediction {
    let kf = k as f64;
    let (p_even, _, _) = even_weight_expectations(k, delta);
    let (_, rest_even, rest_odd) = even_weight_expectations(k - 1, delta);
    // The bin passes when x1 matches the parity of the rest.
    let ones = ((1.0 - delta) * rest_even + delta * rest_odd) / kf;
    let pass = (kf - 1.0) / kf * p_even;
    RoundPrediction { pass_fraction: pass, delta_out: if pass > 0.0 { ones / pass } else { 0.0 } }
}
