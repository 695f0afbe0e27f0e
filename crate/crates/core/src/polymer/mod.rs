//! Periodic polymers driven by global resonant pulses.
//!
//! A ring holds `periods` copies of `pattern`; position `j * p + i` is atom
//! type `pattern[i]` of period `j`. A pair pulse `P(X,Y)` transposes the
//! contents of every adjacent `X`/`Y` pair at once. Head pulses act only on
//! the two ring positions beside the distinguished atom.

mod two_tape;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use two_tape::{two_tape_gather, two_tape_gather_cost, two_tape_stride, two_tape_stride_ca, TwoTapeMachine, ROTATION_PULSES};

use crate::machine::ReversibleGate;
use crate::perm::Permutation;
use crate::{Bit, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolymerSpec {
    pub pattern: Vec<char>,
    pub periods: usize,
    /// Boundary index `j` of the head atom: it sits beside the last atom of
    /// period `j` and the first atom of period `j + 1`.
    pub d_site: Option<usize>,
    /// Boundary index of the single `E` atom (cellular-automaton variant).
    pub e_site: Option<usize>,
    /// Head atoms repeat every `d_spacing` periods (cellular-automaton
    /// variant).
    pub d_spacing: Option<usize>,
}

impl PolymerSpec {
    pub fn new(pattern: &str, periods: usize) -> Result<Self> {
        let spec = PolymerSpec { pattern: pattern.chars().collect(), periods, d_site: None, e_site: None, d_spacing: None };
        spec.validate()?;
        Ok(spec)
    }

    /// Single-tape ring with the head atom at boundary 0.
    pub fn single_tape(periods: usize) -> Result<Self> {
        Ok(PolymerSpec { d_site: Some(0), ..Self::new("ABC", periods)? })
    }

    pub fn with_d_site(mut self, boundary: usize) -> Result<Self> {
        self.d_site = Some(boundary);
        self.validate()?;
        Ok(self)
    }

    pub fn with_automaton(mut self, d_spacing: usize, e_site: usize) -> Result<Self> {
        self.d_spacing = Some(d_spacing);
        self.e_site = Some(e_site);
        self.d_site.get_or_insert(0);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pattern.is_empty() || self.periods == 0 {
            return Err(Error::InvalidParameter("a polymer needs a non-empty pattern and at least one period".into()));
        }
        let mut seen = self.pattern.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.pattern.len() {
            return Err(Error::InvalidParameter(format!("pattern {:?} repeats an atom type", self.pattern)));
        }
        for site in [self.d_site, self.e_site].into_iter().flatten() {
            if site >= self.periods {
                return Err(Error::InvalidParameter(format!("site {site} is outside {} periods", self.periods)));
            }
        }
        if self.d_site.is_some() && (self.pattern.first() != Some(&'A') || self.pattern.last() != Some(&'C')) {
            return Err(Error::InvalidParameter("head atoms sit at a C-A boundary; the pattern must start with A and end with C".into()));
        }
        if let Some(k) = self.d_spacing {
            if k == 0 || !self.periods.is_multiple_of(k) {
                return Err(Error::Spacing { spacing: k, len: self.periods });
            }
        }
        Ok(())
    }

    pub fn ring_len(&self) -> usize {
        self.pattern.len() * self.periods
    }

    pub fn atom(&self, pos: usize) -> char {
        self.pattern[pos % self.pattern.len()]
    }

    pub fn position(&self, atom: char, period: usize) -> Option<usize> {
        let i = self.pattern.iter().position(|&a| a == atom)?;
        Some((period % self.periods) * self.pattern.len() + i)
    }

    /// `(last atom of period j, first atom of period j+1)`.
    pub fn boundary_pair(&self, j: usize) -> (usize, usize) {
        let p = self.pattern.len();
        (j * p + p - 1, ((j + 1) * p) % self.ring_len())
    }

    pub fn head_pair(&self) -> Result<(usize, usize)> {
        let j = self.d_site.ok_or_else(|| Error::InvalidPulse("polymer has no head atom".into()))?;
        Ok(self.boundary_pair(j))
    }

    /// Boundaries carrying a head atom in the automaton variant.
    pub fn automaton_sites(&self) -> Result<Vec<usize>> {
        let k = self.d_spacing.ok_or_else(|| Error::InvalidPulse("polymer has no periodic head atoms".into()))?;
        let start = self.d_site.unwrap_or(0) % k;
        Ok((start..self.periods).step_by(k).collect())
    }

    /// Disjoint adjacent position pairs whose types are `{x, y}`, each
    /// ordered as `(x position, y position)`.
    pub fn layer(&self, x: char, y: char) -> Result<Vec<(usize, usize)>> {
        let n = self.ring_len();
        let mut pairs = Vec::new();
        let mut used = vec![false; n];
        let limit = if n == 2 { 1 } else { n };
        for i in 0..limit {
            let j = (i + 1) % n;
            if i == j {
                continue;
            }
            let (a, b) = (self.atom(i), self.atom(j));
            let pair = if (a, b) == (x, y) {
                (i, j)
            } else if (a, b) == (y, x) {
                (j, i)
            } else {
                continue;
            };
            if used[i] || used[j] {
                return Err(Error::InvalidPulse(format!("P({x},{y}) pairs overlap on this ring")));
            }
            used[i] = true;
            used[j] = true;
            pairs.push(pair);
        }
        if pairs.is_empty() {
            return Err(Error::InvalidPulse(format!("atom types {x} and {y} are never adjacent")));
        }
        Ok(pairs)
    }
}

/// One resonant pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pulse {
    /// Transpose every adjacent pair of these two types.
    Pair(char, char),
    /// Gate on the pair beside the head atom.
    Head(ReversibleGate),
    /// Gate on the pair beside every periodic head atom at once.
    CaHead(ReversibleGate),
    /// Gate on the pair beside the `E` atom.
    EHead(ReversibleGate),
}

impl fmt::Display for Pulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pulse::Pair(x, y) => write!(f, "P({x},{y})"),
            Pulse::Head(g) => write!(f, "HEAD {g}"),
            Pulse::CaHead(g) => write!(f, "CAHEAD {g}"),
            Pulse::EHead(g) => write!(f, "EHEAD {g}"),
        }
    }
}

impl FromStr for Pulse {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidPulse(format!("unrecognised pulse {s:?}"));
        if let Some(inner) = s.strip_prefix("P(").and_then(|r| r.strip_suffix(')')) {
            let mut it = inner.split(',').map(str::trim);
            let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else { return Err(bad()) };
            let one = |t: &str| {
                let mut c = t.chars();
                match (c.next(), c.next()) {
                    (Some(ch), None) => Ok(ch),
                    _ => Err(bad()),
                }
            };
            return Ok(Pulse::Pair(one(x)?, one(y)?));
        }
        match s.split_once(' ') {
            Some(("HEAD", id)) => Ok(Pulse::Head(id.trim().parse()?)),
            Some(("CAHEAD", id)) => Ok(Pulse::CaHead(id.trim().parse()?)),
            Some(("EHEAD", id)) => Ok(Pulse::EHead(id.trim().parse()?)),
            _ => Err(bad()),
        }
    }
}

pub fn pulses_to_text(seq: &[Pulse]) -> String {
    seq.iter().map(|p| format!("{p}\n")).collect()
}

pub fn pulses_from_text(text: &str) -> Result<Vec<Pulse>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| l.parse().map_err(|e: Error| Error::Parse { line: i + 1, msg: e.to_string() }))
        .collect()
}

fn head_pairs(spec: &PolymerSpec, pulse: &Pulse) -> Result<Vec<(usize, usize)>> {
    Ok(match pulse {
        Pulse::Pair(..) => unreachable!(),
        Pulse::Head(_) => vec![spec.head_pair()?],
        Pulse::CaHead(_) => spec.automaton_sites()?.into_iter().map(|j| spec.boundary_pair(j)).collect(),
        Pulse::EHead(_) => {
            let e = spec.e_site.ok_or_else(|| Error::InvalidPulse("polymer has no E atom".into()))?;
            vec![spec.boundary_pair(e)]
        }
    })
}

/// Applies a pulse sequence to ring contents.
pub fn apply_pulses(spec: &PolymerSpec, seq: &[Pulse], bits: &[Bit]) -> Result<Vec<Bit>> {
    if bits.len() != spec.ring_len() {
        return Err(Error::InvalidParameter(format!("{} bits on a ring of {}", bits.len(), spec.ring_len())));
    }
    let mut out = bits.to_vec();
    for pulse in seq {
        match *pulse {
            Pulse::Pair(x, y) => {
                for (i, j) in spec.layer(x, y)? {
                    out.swap(i, j);
                }
            }
            Pulse::Head(g) | Pulse::CaHead(g) | Pulse::EHead(g) => {
                if g.width() != 2 {
                    return Err(Error::InvalidPulse(format!("head pulses take width-2 gates, got width {}", g.width())));
                }
                for (i, j) in head_pairs(spec, pulse)? {
                    let o = g.apply((out[i] as u8) << 1 | out[j] as u8);
                    out[i] = o & 2 != 0;
                    out[j] = o & 1 != 0;
                }
            }
        }
    }
    Ok(out)
}

/// Content map of a pulse sequence. Head gates must be the identity or the
/// swap, the only width-2 gates that move contents without mixing them.
pub fn induced_permutation(spec: &PolymerSpec, seq: &[Pulse]) -> Result<Permutation> {
    spec.validate()?;
    let n = spec.ring_len();
    let mut where_is: Vec<usize> = (0..n).collect();
    let mut at: Vec<usize> = (0..n).collect();
    for pulse in seq {
        let pairs = match *pulse {
            Pulse::Pair(x, y) => spec.layer(x, y)?,
            Pulse::Head(g) | Pulse::CaHead(g) | Pulse::EHead(g) => {
                if g.is_identity() && g.width() == 2 {
                    continue;
                }
                if g != ReversibleGate::swap() {
                    return Err(Error::InvalidPulse(format!("head gate {g} does not permute positions")));
                }
                head_pairs(spec, pulse)?
            }
        };
        for (i, j) in pairs {
            at.swap(i, j);
            where_is[at[i]] = i;
            where_is[at[j]] = j;
        }
    }
    Permutation::new(where_is)
}

/// Disjoint cycles of a permutation; orbits are the tracks contents follow.
pub fn track_decomposition(perm: &Permutation) -> Vec<Vec<usize>> {
    perm.cycles()
}

/// A directed controlled-NOT layer: every `target` atom adjacent to a
/// `control` atom is flipped when the control holds 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnotPulse {
    pub control: char,
    pub target: char,
}

impl fmt::Display for CnotPulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}->{}]", self.control, self.target)
    }
}

pub fn transposition_as_cnots(x: char, y: char) -> [CnotPulse; 3] {
    let xy = CnotPulse { control: x, target: y };
    let yx = CnotPulse { control: y, target: x };
    [xy, yx, xy]
}

pub fn apply_cnot_layer(spec: &PolymerSpec, cnot: CnotPulse, bits: &mut [Bit]) -> Result<()> {
    for (c, t) in spec.layer(cnot.control, cnot.target)? {
        bits[t] ^= bits[c];
    }
    Ok(())
}

pub fn single_tape_shift_seq() -> Vec<Pulse> {
    vec![Pulse::Pair('A', 'B'), Pulse::Pair('C', 'A'), Pulse::Pair('B', 'C')]
}

/// Rotates the A/C tape of an ABCD ring while the B/D tape stays put.
pub fn two_tape_rotate_seq() -> Vec<Pulse> {
    [('A', 'B'), ('B', 'C'), ('A', 'B'), ('C', 'D'), ('A', 'D'), ('C', 'D')].into_iter().map(|(x, y)| Pulse::Pair(x, y)).collect()
}

/// A single-cell shift realised on the single-tape ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRealization {
    pub pulses: Vec<Pulse>,
    /// Ring positions in logical order; the pulses move the content of
    /// `logical[t + 1]` to `logical[t]`.
    pub logical: Vec<usize>,
    pub permutation: Permutation,
}

impl ShiftRealization {
    /// Position of logical cell `t`.
    pub fn cell(&self, t: usize) -> usize {
        self.logical[t % self.logical.len()]
    }
}

/// The three track-advancing pulses followed by `P(A,B) HEAD(SWAP) P(A,B)`.
///
/// The three layers alone move A contents to C, B contents one period back
/// and C contents to A of the next period: two closed tracks (the A/C track
/// of length `2P` and the B track of length `P`). The conjugated head swap
/// exchanges `C_j` with `B_{j+1}`, which joins the two tracks into one cycle
/// through every position. Logical order is read along that cycle.
pub fn realize_abstract_shift(spec: &PolymerSpec) -> Result<ShiftRealization> {
    if spec.pattern != ['A', 'B', 'C'] {
        return Err(Error::InvalidParameter("the shift realisation needs an ABC ring".into()));
    }
    let mut pulses = single_tape_shift_seq();
    pulses.extend([Pulse::Pair('A', 'B'), Pulse::Head(ReversibleGate::swap()), Pulse::Pair('A', 'B')]);
    let permutation = induced_permutation(spec, &pulses)?;
    let inv = permutation.inverse();
    let (_, start) = spec.head_pair()?;
    let mut logical = vec![start];
    let mut pos = inv.image(start);
    while pos != start {
        logical.push(pos);
        pos = inv.image(pos);
    }
    if logical.len() != spec.ring_len() {
        return Err(Error::InvalidPulse(format!("realised shift splits into tracks; cycle through head has {} of {} cells", logical.len(), spec.ring_len())));
    }
    Ok(ShiftRealization { pulses, logical, permutation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc(periods: usize) -> PolymerSpec {
        PolymerSpec::single_tape(periods).unwrap()
    }

    #[test]
    fn empty_and_involutive() {
        let s = abc(4);
        assert!(induced_permutation(&s, &[]).unwrap().is_identity());
        let ab = Pulse::Pair('A', 'B');
        assert!(induced_permutation(&s, &[ab, ab]).unwrap().is_identity());
    }

    #[test]
    fn reversed_sequence_undoes() {
        let s = PolymerSpec::new("ABCD", 5).unwrap();
        let mut seq = two_tape_rotate_seq();
        seq.extend(two_tape_rotate_seq().into_iter().rev());
        assert!(induced_permutation(&s, &seq).unwrap().is_identity());
        let (ab, cd) = (Pulse::Pair('A', 'B'), Pulse::Pair('C', 'D'));
        assert_eq!(induced_permutation(&s, &[ab, cd]).unwrap(), induced_permutation(&s, &[cd, ab]).unwrap());
    }

    #[test]
    fn rotation_orbit_length() {
        for periods in 2..=12 {
            let s = PolymerSpec::new("ABCD", periods).unwrap();
            let p = induced_permutation(&s, &two_tape_rotate_seq()).unwrap();
            let mut cycles = track_decomposition(&p);
            cycles.retain(|c| c.len() > 1);
            assert_eq!(cycles.len(), 2);
            assert!(cycles.iter().all(|c| c.len() == periods));
        }
        assert!(PolymerSpec::new("ABCD", 3).unwrap().with_d_site(0).is_err());
    }

    #[test]
    fn single_tape_tracks() {
        for periods in 2..=30 {
            let s = abc(periods);
            let p = induced_permutation(&s, &single_tape_shift_seq()).unwrap();
            for i in 0..periods {
                let pos = |a, j| s.position(a, j).unwrap();
                assert_eq!(p.image(pos('A', i)), pos('C', i));
                assert_eq!(p.image(pos('B', i)), pos('B', i + periods - 1));
                assert_eq!(p.image(pos('C', i)), pos('A', i + 1));
            }
        }
    }

    #[test]
    fn two_tape_rotation() {
        for periods in 2..=30 {
            let s = PolymerSpec::new("ABCD", periods).unwrap();
            let p = induced_permutation(&s, &two_tape_rotate_seq()).unwrap();
            for i in 0..periods {
                let pos = |a, j| s.position(a, j).unwrap();
                assert_eq!(p.image(pos('B', i)), pos('B', i));
                assert_eq!(p.image(pos('D', i)), pos('D', i));
                assert_eq!(p.image(pos('A', i)), pos('A', i + 1));
                assert_eq!(p.image(pos('C', i)), pos('C', i + periods - 1));
            }
        }
    }

    #[test]
    fn cnot_trio_swaps() {
        let s = PolymerSpec::new("AB", 1).unwrap();
        assert_eq!(transposition_as_cnots('A', 'B').map(|c| c.to_string()), ["[A->B]", "[B->A]", "[A->B]"]);
        for (a, b) in [(false, true), (true, true), (true, false), (false, false)] {
            let mut bits = vec![a, b];
            for c in transposition_as_cnots('A', 'B') {
                apply_cnot_layer(&s, c, &mut bits).unwrap();
            }
            assert_eq!(bits, vec![b, a]);
        }
    }

    #[test]
    fn layer_errors() {
        let s = abc(3);
        assert!(s.layer('A', 'D').is_err());
        assert!(PolymerSpec::new("AB", 3).unwrap().layer('A', 'B').is_err());
        assert!(PolymerSpec::new("AAB", 2).is_err());
        assert!(induced_permutation(&s, &[Pulse::Head(ReversibleGate::cnot())]).is_err());
    }

    #[test]
    fn pulse_text_round_trip() {
        let seq = vec![Pulse::Pair('A', 'B'), Pulse::Head(ReversibleGate::swap()), Pulse::CaHead(ReversibleGate::cnot())];
        let text = pulses_to_text(&seq);
        assert_eq!(text, "P(A,B)\nHEAD SWAP\nCAHEAD CNOT\n");
        assert_eq!(pulses_from_text(&text).unwrap(), seq);
        assert!(pulses_from_text("P(AB)\n").is_err());
    }

    #[test]
    fn realised_shift_is_a_full_cycle() {
        for periods in 2..=40 {
            let s = abc(periods);
            let r = realize_abstract_shift(&s).unwrap();
            let n = s.ring_len();
            let mut total = Permutation::identity(n);
            for _ in 0..n {
                total = total.then(&r.permutation);
            }
            assert!(total.is_identity());
            for t in 0..n {
                assert_eq!(r.permutation.image(r.cell(t + 1)), r.cell(t));
            }
            let (c, a) = s.head_pair().unwrap();
            let touched: Vec<_> = apply_pulses(&s, &[Pulse::Head(ReversibleGate::swap())], &(0..n).map(|i| i == c).collect::<Vec<_>>()).unwrap();
            assert!(touched[a] && touched.iter().filter(|&&b| b).count() == 1);
        }
    }

    #[test]
    fn automaton_sites() {
        let s = PolymerSpec::new("ABC", 6).unwrap().with_automaton(2, 1).unwrap();
        assert_eq!(s.automaton_sites().unwrap(), vec![0, 2, 4]);
        assert!(PolymerSpec::new("ABC", 6).unwrap().with_automaton(4, 1).is_err());
        let bits = vec![true; 18];
        let out = apply_pulses(&s, &[Pulse::CaHead(ReversibleGate::cnot())], &bits).unwrap();
        assert_eq!(out.iter().filter(|&&b| !b).count(), 3);
    }
}
