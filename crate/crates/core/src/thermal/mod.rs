//! Initial thermal states and the permutations applied before and after
//! the cooling phases.

mod io;
mod permute;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use io::{read_ascii, read_packed, write_ascii, write_packed};
pub use permute::{
    apply_perm_as_transpositions, block_stride_perm, emit_permutation, gather_permutation, permutation_cost,
    stride_shuffle_perm, uniform_random_perm, PermCost,
};

use crate::{Bit, Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.1;

/// Distribution of the initial spins. A bit is 0 with probability
/// `(1 + epsilon) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BiasModel {
    Binomial { epsilon: f64 },
    /// Stationary two-state chain whose lag-`d` correlation is `rho^d`, with
    /// `rho` chosen so the correlation at distance `ell` equals `threshold`.
    MarkovCorrelated { epsilon: f64, ell: usize, threshold: f64 },
}

impl BiasModel {
    pub fn binomial(epsilon: f64) -> Self {
        BiasModel::Binomial { epsilon }
    }

    pub fn markov(epsilon: f64, ell: usize) -> Self {
        BiasModel::MarkovCorrelated { epsilon, ell, threshold: DEFAULT_THRESHOLD }
    }

    pub fn epsilon(&self) -> f64 {
        match *self {
            BiasModel::Binomial { epsilon } | BiasModel::MarkovCorrelated { epsilon, .. } => epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let eps = self.epsilon();
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in [0, 1], got {eps}")));
        }
        if let BiasModel::MarkovCorrelated { ell, threshold, .. } = *self {
            if ell == 0 {
                return Err(Error::InvalidParameter("correlation distance ell must be at least 1".into()));
            }
            if !(threshold > 0.0 && threshold < 1.0) {
                return Err(Error::InvalidParameter(format!("correlation threshold must lie in (0, 1), got {threshold}")));
            }
        }
        Ok(())
    }

    /// Lag-1 correlation of the chain; 0 for independent bits.
    pub fn rho(&self) -> f64 {
        match *self {
            BiasModel::Binomial { .. } => 0.0,
            BiasModel::MarkovCorrelated { ell, threshold, .. } => threshold.powf(1.0 / ell as f64),
        }
    }
}

/// Draws `n` bits from `model`; the same `(model, n, seed)` always gives the
/// same bits.
pub fn sample(model: &BiasModel, n: usize, seed: u64) -> Result<Vec<Bit>> {
    model.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_one = (1.0 - model.epsilon()) / 2.0;
    let mut bits = Vec::with_capacity(n);
    match model {
        BiasModel::Binomial { .. } => bits.extend((0..n).map(|_| rng.random_bool(p_one))),
        BiasModel::MarkovCorrelated { .. } => {
            // Keep the previous spin with probability rho, otherwise redraw
            // from the marginal; this gives corr(d) = rho^d.
            let rho = model.rho();
            let mut prev = rng.random_bool(p_one);
            bits.push(prev);
            for _ in 1..n {
                if !rng.random_bool(rho) {
                    prev = rng.random_bool(p_one);
                }
                bits.push(prev);
            }
        }
    }
    Ok(bits)
}

/// Pearson correlation at lag `d` of the +-1 spin encoding.
pub fn lag_correlation(bits: &[Bit], d: usize) -> f64 {
    let spin = |b: Bit| if b { -1.0 } else { 1.0 };
    let m = bits.len() - d;
    let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..m {
        let x = spin(bits[i]);
        let y = spin(bits[i + d]);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let mf = m as f64;
    let cov = sxy / mf - (sx / mf) * (sy / mf);
    let vx = sxx / mf - (sx / mf).powi(2);
    let vy = syy / mf - (sy / mf).powi(2);
    cov / (vx * vy).sqrt()
}

/// SplitMix64 finaliser, used to derive independent child seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count_ones;

    #[test]
    fn full_bias_gives_zeros() {
        assert_eq!(sample(&BiasModel::binomial(1.0), 5, 3).unwrap(), vec![false; 5]);
        assert_eq!(sample(&BiasModel::markov(1.0, 4), 5, 3).unwrap(), vec![false; 5]);
    }

    #[test]
    fn binomial_ones_fraction() {
        let n = 1_000_000;
        let bits = sample(&BiasModel::binomial(0.2), n, 11).unwrap();
        let frac = count_ones(&bits) as f64 / n as f64;
        let sigma = (0.24f64 / n as f64).sqrt();
        assert!((frac - 0.4).abs() < 3.0 * sigma && (frac - 0.4).abs() < 0.0015, "{frac}");
    }

    #[test]
    fn reproducible_per_seed() {
        let m = BiasModel::markov(0.3, 5);
        assert_eq!(sample(&m, 1000, 9).unwrap(), sample(&m, 1000, 9).unwrap());
        assert_ne!(sample(&m, 1000, 9).unwrap(), sample(&m, 1000, 10).unwrap());
    }

    #[test]
    fn markov_correlation_decay() {
        let n = 1_000_000;
        let m = BiasModel::markov(0.0, 10);
        let bits = sample(&m, n, 5).unwrap();
        assert!((lag_correlation(&bits, 10) - 0.1).abs() < 0.01);
        for d in 1..=30 {
            assert!((lag_correlation(&bits, d) - m.rho().powi(d as i32)).abs() < 0.02, "lag {d}");
        }
    }

    #[test]
    fn markov_marginal() {
        let n = 1_000_000;
        let bits = sample(&BiasModel::markov(0.2, 10), n, 6).unwrap();
        let frac_zero = 1.0 - count_ones(&bits) as f64 / n as f64;
        // Correlation inflates the variance by (1 + rho) / (1 - rho).
        let rho = BiasModel::markov(0.2, 10).rho();
        let sigma = (0.24 / n as f64 * (1.0 + rho) / (1.0 - rho)).sqrt();
        assert!((frac_zero - 0.6).abs() < 3.0 * sigma, "{frac_zero}");
    }

    #[test]
    fn invalid_models() {
        assert!(sample(&BiasModel::binomial(1.5), 4, 0).is_err());
        assert!(sample(&BiasModel::markov(0.5, 0), 4, 0).is_err());
        let bad = BiasModel::MarkovCorrelated { epsilon: 0.5, ell: 3, threshold: 1.0 };
        assert!(sample(&bad, 4, 0).is_err());
        assert!(sample(&BiasModel::binomial(0.5), 0, 0).is_err());
    }

    #[test]
    fn child_seeds_differ() {
        assert_ne!(mix_seed(1, 0), mix_seed(1, 1));
        assert_ne!(mix_seed(1, 0), mix_seed(2, 0));
        assert_eq!(mix_seed(7, 3), mix_seed(7, 3));
    }
}
