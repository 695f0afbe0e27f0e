//! Fixtures shared by the criterion benchmarks in `benches/`.

use spinref_core::thermal::{sample, BiasModel};
use spinref_core::Bit;

/// Binomial bits with bias `epsilon`, fixed seed so runs compare.
pub fn thermal_bits(n: usize, epsilon: f64) -> Vec<Bit> {
    sample(&BiasModel::binomial(epsilon), n, 0xbe_7c).expect("valid model")
}

/// Sizes used by the scaling groups.
pub const SIZES: [usize; 3] = [729, 2187, 6561];
