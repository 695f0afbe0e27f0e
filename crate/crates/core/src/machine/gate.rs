use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A bijection on `width`-bit tuples.
///
/// Tuples are indexed most-significant-bit first: for a width-4 gate acting
/// on `(x1, x2, y1, y2)` the index is `x1<<3 | x2<<2 | y1<<1 | y2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ReversibleGate {
    width: u8,
    table: [u8; 16],
}

/// Named gates used by the compiler, in lookup order.
const LIBRARY: &[&str] = &["ID2", "SWAP", "EQ", "CNOT", "PARITY_Y1", "CSWAP0_Y2", "CSWAP1_Y2", "INC4", "DEC4", "DECIDE"];

impl ReversibleGate {
    pub fn new(width: usize, table: &[u8]) -> Result<Self> {
        if !(2..=4).contains(&width) {
            return Err(Error::GateWidth(width));
        }
        let size = 1usize << width;
        if table.len() != size {
            return Err(Error::InvalidGate { width });
        }
        let mut seen = 0u32;
        let mut out = [0u8; 16];
        for (i, &t) in table.iter().enumerate() {
            if (t as usize) >= size || seen & (1 << t) != 0 {
                return Err(Error::InvalidGate { width });
            }
            seen |= 1 << t;
            out[i] = t;
        }
        Ok(ReversibleGate { width: width as u8, table: out })
    }

    pub fn from_fn(width: usize, f: impl Fn(u8) -> u8) -> Result<Self> {
        let table: Vec<u8> = (0..1u8 << width).map(f).collect();
        Self::new(width, &table)
    }

    fn known(width: usize, f: impl Fn(u8) -> u8) -> Self {
        Self::from_fn(width, f).expect("library gate is a bijection")
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn table(&self) -> &[u8] {
        &self.table[..1 << self.width]
    }

    pub fn apply(&self, input: u8) -> u8 {
        self.table[input as usize]
    }

    pub fn inverse(&self) -> Self {
        let mut table = [0u8; 16];
        for (i, &t) in self.table().iter().enumerate() {
            table[t as usize] = i as u8;
        }
        ReversibleGate { width: self.width, table }
    }

    pub fn is_identity(&self) -> bool {
        self.table().iter().enumerate().all(|(i, &t)| i == t as usize)
    }

    pub fn identity(width: usize) -> Result<Self> {
        Self::from_fn(width, |x| x)
    }

    /// Identity on the head pair.
    pub fn id2() -> Self {
        Self::known(2, |x| x)
    }

    /// Exchanges the two head cells.
    pub fn swap() -> Self {
        Self::known(2, |x| ((x & 1) << 1) | (x >> 1))
    }

    /// "Are they equal?": `x1 ^= x2`, so `x1` is 0 exactly on equal pairs.
    pub fn eq() -> Self {
        Self::known(2, |x| x ^ ((x & 1) << 1))
    }

    /// `x2 ^= x1`.
    pub fn cnot() -> Self {
        Self::known(2, |x| x ^ (x >> 1))
    }

    /// Width 3: `y1 ^= x1`.
    pub fn parity_y1() -> Self {
        Self::known(3, |x| x ^ (x >> 2))
    }

    /// Width 4: exchange `x1` and `y2` when `y1 == control`.
    pub fn cswap_y2(control: bool) -> Self {
        Self::known(4, move |x| {
            let y1 = (x >> 1) & 1 == 1;
            if y1 != control {
                return x;
            }
            let x1 = (x >> 3) & 1;
            let y2 = x & 1;
            (x & 0b0110) | (y2 << 3) | x1
        })
    }

    /// Width 4: if `x1` is set, add one to the counter `(y1, y2)` modulo 4
    /// (`y1` is the high bit).
    pub fn inc4() -> Self {
        Self::known(4, |x| if x & 8 != 0 { (x & 0b1100) | (((x & 3) + 1) & 3) } else { x })
    }

    pub fn dec4() -> Self {
        Self::inc4().inverse()
    }

    /// Width 4: `x1 ^= y1 OR y2`.
    pub fn decide() -> Self {
        Self::known(4, |x| if x & 3 != 0 { x ^ 8 } else { x })
    }

    pub fn named(name: &str) -> Option<Self> {
        Some(match name {
            "ID2" => Self::id2(),
            "SWAP" => Self::swap(),
            "EQ" => Self::eq(),
            "CNOT" => Self::cnot(),
            "PARITY_Y1" => Self::parity_y1(),
            "CSWAP0_Y2" => Self::cswap_y2(false),
            "CSWAP1_Y2" => Self::cswap_y2(true),
            "INC4" => Self::inc4(),
            "DEC4" => Self::dec4(),
            "DECIDE" => Self::decide(),
            _ => return None,
        })
    }

    /// Library name if the gate has one, else `T<width>:<hex table>`.
    pub fn label(&self) -> String {
        for name in LIBRARY {
            if Self::named(name).as_ref() == Some(self) {
                return (*name).to_string();
            }
        }
        let hex: String = self.table().iter().map(|t| char::from_digit(*t as u32, 16).unwrap()).collect();
        format!("T{}:{}", self.width, hex)
    }
}

impl fmt::Display for ReversibleGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ReversibleGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(g) = Self::named(s) {
            return Ok(g);
        }
        let bad = || Error::InvalidParameter(format!("unknown gate {s:?}"));
        let rest = s.strip_prefix('T').ok_or_else(bad)?;
        let (w, hex) = rest.split_once(':').ok_or_else(bad)?;
        let width: usize = w.parse().map_err(|_| bad())?;
        let table = hex.chars().map(|c| c.to_digit(16).map(|d| d as u8).ok_or_else(bad)).collect::<Result<Vec<_>>>()?;
        Self::new(width, &table)
    }
}

impl TryFrom<String> for ReversibleGate {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ReversibleGate> for String {
    fn from(g: ReversibleGate) -> String {
        g.label()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eq_gate_matches_phase_one_rule() {
        let g = ReversibleGate::eq();
        assert_eq!(g.apply(0b01), 0b11);
        assert_eq!(g.apply(0b11), 0b01);
        assert_eq!(g.apply(0b00), 0b00);
        assert_eq!(g.apply(0b10), 0b10);
    }

    #[test]
    fn rejects_non_bijective_tables() {
        assert!(ReversibleGate::new(2, &[0, 0, 1, 2]).is_err());
        assert!(ReversibleGate::new(2, &[0, 1, 2]).is_err());
        assert!(ReversibleGate::new(5, &[0; 32]).is_err());
        assert!(ReversibleGate::new(1, &[0, 1]).is_err());
    }

    #[test]
    fn library_gates_invert() {
        for name in LIBRARY {
            let g = ReversibleGate::named(name).unwrap();
            for x in 0..(1u8 << g.width()) {
                assert_eq!(g.inverse().apply(g.apply(x)), x, "{name}");
            }
            assert_eq!(g.label(), *name);
        }
    }

    #[test]
    fn counter_wraps_mod_four() {
        let g = ReversibleGate::inc4();
        assert_eq!(g.apply(0b1011), 0b1000);
        assert_eq!(g.apply(0b1001), 0b1010);
        assert_eq!(g.apply(0b0011), 0b0011);
    }

    #[test]
    fn conditional_swap() {
        let g = ReversibleGate::cswap_y2(true);
        assert_eq!(g.apply(0b1010), 0b0011);
        assert_eq!(g.apply(0b1000), 0b1000);
        let h = ReversibleGate::cswap_y2(false);
        assert_eq!(h.apply(0b1000), 0b0001);
    }

    #[test]
    fn label_round_trip() {
        let g = ReversibleGate::new(3, &[1, 0, 2, 3, 4, 5, 7, 6]).unwrap();
        let label = g.label();
        assert_eq!(label, "T3:10234576");
        assert_eq!(label.parse::<ReversibleGate>().unwrap(), g);
        assert!("NOPE".parse::<ReversibleGate>().is_err());
    }
}
