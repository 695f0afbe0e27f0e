//! Closed-form recurrences, bounds and accounting for the three phases.

mod ledger;
mod phase1;
mod phase2;
mod phase3;

use serde::{Deserialize, Serialize};

pub use ledger::{entropy_cap, yield_ledger, LossFactors, PhaseLoss, YieldLedger};
pub use phase1::{
    backward_orbit, bias_backward, bias_forward, forward_orbit, low_region_bound, phase1_overhead, phase1_rounds_needed,
    survivor_fraction, Phase1Overhead,
};
pub use phase2::{
    delta1_bound, even_weight_expectations, phase2_bounds, phase2_exact, phase2_region_floor, phase2_stationary,
    region_floor_at_worst, region_four_cumulative, Phase2Bounds, Phase2Region, RoundPrediction, Stationary,
};
pub use phase3::{phase3_certify, phase3_exact, phase3_loss_floor, phase3_recurrence, Phase3Certificate};

use crate::{Error, Result};

/// Boltzmann constant in erg/K, rounded as in the usual back-of-envelope
/// estimate.
pub const K_B_CGS: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationParams {
    /// Nuclear magnetic moment, erg/G.
    pub mu: f64,
    /// Field strength, G.
    pub b0: f64,
    /// Temperature, K.
    pub temperature: f64,
    pub k_b: f64,
}

impl PolarizationParams {
    pub fn new(mu: f64, b0: f64, temperature: f64) -> Self {
        PolarizationParams { mu, b0, temperature, k_b: K_B_CGS }
    }
}

/// Thermal polarisation `mu * B0 / (kB * T)`.
pub fn epsilon_thermal(p: &PolarizationParams) -> Result<f64> {
    if !(p.mu > 0.0 && p.b0 >= 0.0 && p.temperature > 0.0 && p.k_b > 0.0) {
        return Err(Error::InvalidParameter(format!("polarisation parameters must be positive: {p:?}")));
    }
    Ok(p.mu * p.b0 / (p.k_b * p.temperature))
}

/// Ones-fraction of an epsilon-biased bit.
pub fn delta_of(epsilon: f64) -> f64 {
    (1.0 - epsilon) / 2.0
}

pub fn epsilon_of(delta: f64) -> f64 {
    1.0 - 2.0 * delta
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Least-squares slope of `ln(steps)` against `ln(size)`.
pub fn runtime_exponent(sizes: &[f64], steps: &[f64]) -> Result<f64> {
    if sizes.len() != steps.len() {
        return Err(Error::InvalidParameter("sizes and step counts differ in length".into()));
    }
    if sizes.len() < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 points to fit an exponent, got {}", sizes.len())));
    }
    if sizes.iter().chain(steps).any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter("sizes and step counts must be positive".into()));
    }
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("sizes must not all be equal".into()));
    }
    Ok(sxy / sxx)
}

/// An orbit as CSV with header `i,<name>`.
pub fn orbit_csv(name: &str, values: &[f64]) -> String {
    let mut out = format!("i,{name}\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{i},{v:.12e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn room_temperature_polarisation() {
        let eps = epsilon_thermal(&PolarizationParams::new(1e-23, 1e5, 300.0)).unwrap();
        assert!((eps - 3.333e-5).abs() < 1e-8, "{eps}");
        let cold = epsilon_thermal(&PolarizationParams::new(1e-23, 1e5, 30.0)).unwrap();
        assert!((cold / eps - 10.0).abs() < 1e-9);
        assert_eq!(epsilon_thermal(&PolarizationParams::new(1e-23, 0.0, 300.0)).unwrap(), 0.0);
        assert!(epsilon_thermal(&PolarizationParams::new(1e-23, 1e5, 0.0)).is_err());
    }

    #[test]
    fn delta_epsilon_correspondence() {
        assert!((delta_of(0.856) - 0.072).abs() < 1e-12);
        assert!((epsilon_of(0.072) - 0.856).abs() < 1e-12);
    }

    #[test]
    fn exponent_fit() {
        let sizes = [729.0, 2187.0, 6561.0, 19683.0];
        let steps: Vec<f64> = sizes.iter().map(|n: &f64| 3.0 * n * n).collect();
        assert!((runtime_exponent(&sizes, &steps).unwrap() - 2.0).abs() < 1e-12);
        assert!(runtime_exponent(&sizes[..3], &steps[..3]).is_err());
    }

    #[test]
    fn orbit_csv_layout() {
        assert_eq!(orbit_csv("epsilon", &[0.5]), "i,epsilon\n0,5.000000000000e-1\n");
    }
}
