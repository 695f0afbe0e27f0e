use serde::{Deserialize, Serialize};

use super::h2;

/// Information-theoretic ceiling on clean bits: `n (1 - H2((1+eps)/2))`.
///
/// For small `eps` this is about `n eps^2 / (2 ln 2)`.
pub fn entropy_cap(n: f64, epsilon: f64) -> f64 {
    n * (1.0 - h2((1.0 + epsilon) / 2.0))
}

/// Per-phase bit-loss multipliers (input bits per output bit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossFactors {
    pub phase1_low_region: f64,
    pub phase1_product: f64,
    pub phase2_regions: [f64; 3],
    pub phase2_fourth_region: f64,
}

impl Default for LossFactors {
    fn default() -> Self {
        LossFactors {
            phase1_low_region: 1.0017,
            phase1_product: 6.7,
            phase2_regions: [1.0 / 0.532, 1.0 / 0.75, 1.0 / 0.899],
            phase2_fourth_region: 1.0 / 0.96,
        }
    }
}

impl LossFactors {
    pub fn product(&self) -> f64 {
        self.phase1_low_region * self.phase1_product * self.phase2_regions.iter().product::<f64>() * self.phase2_fourth_region
    }
}

/// Observed loss of one phase of a pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLoss {
    pub phase: String,
    pub n_in: u64,
    pub n_out: u64,
    /// `n_in / n_out`, or infinity when nothing survived.
    pub factor: f64,
}

impl PhaseLoss {
    pub fn new(phase: impl Into<String>, n_in: u64, n_out: u64) -> Self {
        let factor = if n_out == 0 { f64::INFINITY } else { n_in as f64 / n_out as f64 };
        PhaseLoss { phase: phase.into(), n_in, n_out, factor }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YieldLedger {
    pub epsilon: f64,
    pub n: u64,
    pub clean_bits: u64,
    pub factors: LossFactors,
    /// Product of the loss factors, independent of epsilon.
    pub constant_product: f64,
    /// Clean bits per input bit per unit `eps^2` guaranteed by the factors.
    pub c: f64,
    /// `constant_product * eps^-2`.
    pub total_factor: f64,
    /// `n / total_factor`.
    pub expected_floor: f64,
    pub entropy_cap: f64,
    pub within_twenty: bool,
    pub within_cap: bool,
    pub meets_floor: bool,
    pub phases: Vec<PhaseLoss>,
    /// Product of the observed phase factors.
    pub empirical_product: f64,
}

pub fn yield_ledger(epsilon: f64, n: u64, clean_bits: u64) -> YieldLedger {
    let factors = LossFactors::default();
    let constant_product = factors.product();
    let total_factor = constant_product / (epsilon * epsilon);
    let cap = entropy_cap(n as f64, epsilon);
    let expected_floor = n as f64 / total_factor;
    YieldLedger {
        epsilon,
        n,
        clean_bits,
        factors,
        constant_product,
        c: 1.0 / constant_product,
        total_factor,
        expected_floor,
        entropy_cap: cap,
        within_twenty: constant_product <= 20.0,
        within_cap: clean_bits as f64 <= cap + 1e-9,
        meets_floor: clean_bits as f64 >= expected_floor,
        phases: Vec::new(),
        empirical_product: 1.0,
    }
}

impl YieldLedger {
    pub fn with_phases(mut self, phases: Vec<PhaseLoss>) -> Self {
        self.empirical_product = phases.iter().map(|p| p.factor).product();
        self.phases = phases;
        self
    }

    /// Relative gap between the observed phase-factor product and
    /// `n / clean_bits`.
    pub fn consistency_gap(&self) -> f64 {
        if self.clean_bits == 0 {
            return if self.empirical_product.is_infinite() { 0.0 } else { f64::INFINITY };
        }
        let overall = self.n as f64 / self.clean_bits as f64;
        (self.empirical_product - overall).abs() / overall
    }
}
