use serde::{Deserialize, Serialize};

use super::RoundRecord;
use crate::analysis::{bias_forward, forward_orbit, survivor_fraction};
use crate::{compiler, Bit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase1Config {
    pub target_bias: f64,
    /// Overrides the round count derived from the recurrence.
    pub rounds: Option<usize>,
}

impl Default for Phase1Config {
    fn default() -> Self {
        Phase1Config { target_bias: 0.856, rounds: None }
    }
}

/// Keeps the second bit of every equal pair. Unequal pairs and an odd
/// trailing bit are dropped.
pub fn pair_survivors(bits: &[Bit]) -> Vec<Bit> {
    bits.chunks_exact(2).filter(|p| p[0] == p[1]).map(|p| p[1]).collect()
}

/// One pairing round; `bias_pred` is the forward recurrence applied to the
/// input's observed bias.
pub fn phase1_round(bits: &[Bit]) -> (Vec<Bit>, RoundRecord) {
    let out = pair_survivors(bits);
    let mut rec = RoundRecord::new(1, bits, &out);
    rec.bias_pred = bias_forward(rec.input_bias().unwrap_or(0.0));
    let cost = compiler::phase1_steps(bits.len());
    rec.steps = cost.total();
    rec.shifts = cost.shifts;
    (out, rec)
}

/// Applies pairing rounds following a precomputed orbit `[eps0, eps1, ..]`;
/// one round per step of the orbit.
pub fn phase1_apply(mut bits: Vec<Bit>, orbit: &[f64]) -> (Vec<Bit>, Vec<RoundRecord>) {
    let mut records = Vec::new();
    for (round, &pred) in orbit.iter().skip(1).enumerate() {
        let (out, mut rec) = phase1_round(&bits);
        rec.round = round;
        rec.bias_pred = pred;
        records.push(rec);
        bits = out;
    }
    (bits, records)
}

/// Pairing rounds until the predicted bias from `epsilon0` reaches the
/// target. Fails when the predicted survivor count drops below 2 first.
pub fn phase1_run(bits: Vec<Bit>, epsilon0: f64, config: &Phase1Config) -> Result<(Vec<Bit>, Vec<RoundRecord>)> {
    let mut orbit = forward_orbit(epsilon0, config.target_bias)?;
    if let Some(r) = config.rounds {
        orbit.truncate(r + 1);
        while orbit.len() < r + 1 {
            orbit.push(bias_forward(*orbit.last().unwrap()));
        }
    }
    let mut expected = bits.len() as f64;
    for (round, e) in orbit[..orbit.len() - 1].iter().enumerate() {
        if expected < 2.0 {
            return Err(Error::InsufficientBits { epsilon: epsilon0, target: config.target_bias, rounds: round, survivors: expected });
        }
        expected *= survivor_fraction(*e);
    }
    Ok(phase1_apply(bits, &orbit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits_from_str;
    use crate::thermal::{sample, BiasModel};

    #[test]
    fn pair_rule() {
        let (out, rec) = phase1_round(&bits_from_str("00011011").unwrap());
        assert_eq!(out, bits_from_str("01").unwrap());
        assert_eq!((rec.n_in, rec.n_out, rec.ones_in, rec.ones_out), (8, 2, 4, 1));
        assert_eq!(pair_survivors(&[false; 6]), vec![false; 3]);
        assert_eq!(pair_survivors(&bits_from_str("111").unwrap()), vec![true]);
    }

    #[test]
    fn survivor_bias_at_half() {
        let n = 1_000_000;
        let bits = sample(&BiasModel::binomial(0.5), n, 1).unwrap();
        let (out, _) = phase1_round(&bits);
        let m = out.len() as f64;
        let bias = 1.0 - 2.0 * crate::count_ones(&out) as f64 / m;
        let sigma = 2.0 * (0.1 * 0.9 / m).sqrt();
        assert!((bias - 0.8).abs() < 3.0 * sigma, "{bias}");
        let expected = n as f64 * survivor_fraction(0.5);
        let sd = (n as f64 / 2.0 * (1.25 / 2.0) * (1.0 - 1.25 / 2.0)).sqrt();
        assert!((m - expected).abs() < 3.0 * sd);
    }

    #[test]
    fn runs_follow_the_recurrence() {
        let cfg = Phase1Config::default();
        let bits = vec![false; 10];
        let (out, recs) = phase1_run(bits.clone(), 0.857, &cfg).unwrap();
        assert!(recs.is_empty() && out == bits);

        let bits = sample(&BiasModel::binomial(0.2), 100_000, 3).unwrap();
        let (_, recs) = phase1_run(bits, 0.2, &cfg).unwrap();
        assert_eq!(recs.len(), crate::analysis::phase1_rounds_needed(0.2, 0.856).unwrap());
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(r.round, i);
            assert!(r.n_out <= r.n_in / 2);
        }
        assert!(recs.last().unwrap().bias_pred >= 0.856);
    }

    #[test]
    fn too_few_bits_is_an_error() {
        let err = phase1_run(vec![false; 8], 0.01, &Phase1Config::default()).unwrap_err();
        assert!(matches!(err, Error::InsufficientBits { .. }));
        assert!(phase1_run(vec![false; 8], 0.0, &Phase1Config::default()).is_err());
    }

    #[test]
    fn fixed_round_override() {
        let cfg = Phase1Config { rounds: Some(2), ..Default::default() };
        let (_, recs) = phase1_run(vec![false; 64], 0.1, &cfg).unwrap();
        assert_eq!(recs.len(), 2);
        let (out, _) = phase1_run(vec![false; 64], 0.1, &Phase1Config { rounds: Some(0), ..Default::default() }).unwrap();
        assert_eq!(out.len(), 64);
    }
}
