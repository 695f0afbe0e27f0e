use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Bias of the survivors of one pairing round.
pub fn bias_forward(epsilon: f64) -> f64 {
    2.0 * epsilon / (1.0 + epsilon * epsilon)
}

/// Inverse of [`bias_forward`] on `(0, 1]`, written as
/// `e / (1 + sqrt(1 - e^2))` to avoid cancellation at small `e`.
pub fn bias_backward(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!("backward recurrence needs 0 < epsilon <= 1, got {epsilon}")));
    }
    Ok(epsilon / (1.0 + (1.0 - epsilon * epsilon).sqrt()))
}

/// Expected survivors per input bit in one pairing round.
pub fn survivor_fraction(epsilon: f64) -> f64 {
    (1.0 + epsilon * epsilon) / 4.0
}

fn reached(epsilon: f64, target: f64) -> bool {
    epsilon >= target - 1e-12
}

/// `[eps0, eps1, ...]`, stopping at the first term that reaches `target`.
pub fn forward_orbit(epsilon0: f64, target: f64) -> Result<Vec<f64>> {
    if !(epsilon0 > 0.0 && epsilon0 <= 1.0) {
        return Err(Error::InvalidParameter(format!("phase 1 needs 0 < epsilon <= 1, got {epsilon0}")));
    }
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("target bias must lie in (0, 1), got {target}")));
    }
    let mut orbit = vec![epsilon0];
    let mut e = epsilon0;
    while !reached(e, target) {
        e = bias_forward(e);
        orbit.push(e);
    }
    Ok(orbit)
}

/// Rounds of pairing needed to lift `epsilon0` to `target`.
pub fn phase1_rounds_needed(epsilon0: f64, target: f64) -> Result<usize> {
    Ok(forward_orbit(epsilon0, target)?.len() - 1)
}

/// `[target, backward(target), ...]` with `steps + 1` entries.
pub fn backward_orbit(target: f64, steps: usize) -> Result<Vec<f64>> {
    let mut orbit = vec![target];
    for _ in 0..steps {
        let last = *orbit.last().unwrap();
        orbit.push(bias_backward(last)?);
    }
    Ok(orbit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase1Overhead {
    pub rounds: usize,
    /// `prod_{j<rounds} (1 + eps_j^2)` along the forward orbit.
    pub product: f64,
    /// Square of `product`: survivors fall short of `4^-rounds` by this factor.
    pub squared: f64,
    /// Squared product over every orbit term including the final one, the
    /// way the table is usually written down from the target downwards.
    pub tabulated_squared: f64,
}

pub fn phase1_overhead(epsilon0: f64, target: f64) -> Result<Phase1Overhead> {
    let orbit = forward_orbit(epsilon0, target)?;
    let rounds = orbit.len() - 1;
    let product: f64 = orbit[..rounds].iter().map(|e| 1.0 + e * e).product();
    let full = product * (1.0 + orbit[rounds] * orbit[rounds]);
    Ok(Phase1Overhead { rounds, product, squared: product * product, tabulated_squared: full * full })
}

/// Bound on the squared product over all rounds with `eps <= 0.01`, from the
/// geometric decay `eps_j <= 0.5004 eps_{j+1}` below 0.02.
pub fn low_region_bound() -> f64 {
    (0.02f64.powi(2) * 2.0 / (1.0 - 0.5004)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_points_and_half() {
        assert_eq!(bias_forward(0.0), 0.0);
        assert_eq!(bias_forward(1.0), 1.0);
        // Pair outcomes at eps = 0.5: keep-0 with 0.75^2, keep-1 with 0.25^2.
        let (p0, p1) = (0.75f64 * 0.75, 0.25f64 * 0.25);
        assert!((bias_forward(0.5) - (p0 - p1) / (p0 + p1)).abs() < 1e-15);
        assert!((bias_forward(0.5) - 0.8).abs() < 1e-15);
        assert!(bias_backward(0.0).is_err());
        assert!((bias_backward(0.856).unwrap() - 0.5643).abs() < 1e-4);
    }

    #[test]
    fn seventh_backward_iterate() {
        let orbit = backward_orbit(0.856, 7).unwrap();
        assert!((orbit[7] - 0.009985).abs() < 1e-6, "{}", orbit[7]);
        assert_eq!(phase1_rounds_needed(orbit[7], 0.856).unwrap(), 7);
        // The rounded literal falls just short after seven rounds.
        assert_eq!(phase1_rounds_needed(0.009985, 0.856).unwrap(), 8);
        assert_eq!(phase1_rounds_needed(0.857, 0.856).unwrap(), 0);
    }

    #[test]
    fn overhead_products() {
        let start = backward_orbit(0.856, 7).unwrap()[7];
        let o = phase1_overhead(start, 0.856).unwrap();
        assert_eq!(o.rounds, 7);
        assert!(o.squared < 6.7 && o.tabulated_squared < 6.7, "{o:?}");
        assert!((o.tabulated_squared - 6.694).abs() < 1e-3, "{o:?}");
        let empty = phase1_overhead(0.856, 0.856).unwrap();
        assert_eq!((empty.rounds, empty.product), (0, 1.0));

        assert!(low_region_bound() < 1.0017);
        let low = forward_orbit(1e-6, 0.01).unwrap();
        let squared: f64 = low.iter().filter(|&&e| e < 0.01).map(|e| (1.0 + e * e).powi(2)).product();
        assert!(squared < low_region_bound(), "{squared}");
    }

    #[test]
    fn bad_inputs() {
        assert!(forward_orbit(0.0, 0.856).is_err());
        assert!(forward_orbit(0.1, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn forward_is_increasing_amplifier(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(bias_forward(lo) <= bias_forward(hi));
            prop_assert!(bias_forward(a) >= a);
        }

        #[test]
        fn backward_inverts_forward(e in 1e-9f64..1.0) {
            prop_assert!((bias_backward(bias_forward(e)).unwrap() - e).abs() < 1e-12);
            prop_assert!((bias_forward(bias_backward(e).unwrap()) - e).abs() < 1e-12);
        }
    }
}
