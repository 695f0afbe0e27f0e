//! Two independent cyclic tapes sharing one head site.
//!
//! Rotating one tape by a cell costs the six pair pulses of
//! [`super::two_tape_rotate_seq`]. Exchanging the cells under the head is
//! one head pulse. With periodic head atoms every `spacing` cells, a single
//! pulse exchanges all of them at once.

use crate::machine::Direction;
use crate::{Bit, Error, Result};

pub const ROTATION_PULSES: u64 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoTapeMachine {
    upper: Vec<Bit>,
    lower: Vec<Bit>,
    upper_head: usize,
    lower_head: usize,
    steps: u64,
}

impl TwoTapeMachine {
    /// `upper` holds the data; the lower tape starts blank.
    pub fn new(upper: Vec<Bit>) -> Result<Self> {
        if upper.is_empty() {
            return Err(Error::EmptyTape);
        }
        let n = upper.len();
        Ok(TwoTapeMachine { upper, lower: vec![false; n], upper_head: 0, lower_head: 0, steps: 0 })
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Tape contents in logical order starting at the origin.
    pub fn upper(&self) -> &[Bit] {
        &self.upper
    }

    pub fn lower(&self) -> &[Bit] {
        &self.lower
    }

    pub fn upper_head(&self) -> usize {
        self.upper_head
    }

    pub fn lower_head(&self) -> usize {
        self.lower_head
    }

    fn step(pos: usize, dir: Direction, n: usize) -> usize {
        match dir {
            Direction::Right => (pos + 1) % n,
            Direction::Left => (pos + n - 1) % n,
        }
    }

    pub fn rotate_upper(&mut self, dir: Direction) {
        self.upper_head = Self::step(self.upper_head, dir, self.len());
        self.steps += ROTATION_PULSES;
    }

    pub fn rotate_lower(&mut self, dir: Direction) {
        self.lower_head = Self::step(self.lower_head, dir, self.len());
        self.steps += ROTATION_PULSES;
    }

    /// Moves the upper head to logical cell `target` by the shorter way.
    pub fn seek_upper(&mut self, target: usize) {
        while self.upper_head != target {
            let dir = shorter(self.upper_head, target, self.len());
            self.rotate_upper(dir);
        }
    }

    pub fn seek_lower(&mut self, target: usize) {
        while self.lower_head != target {
            let dir = shorter(self.lower_head, target, self.len());
            self.rotate_lower(dir);
        }
    }

    pub fn exchange(&mut self) {
        std::mem::swap(&mut self.upper[self.upper_head], &mut self.lower[self.lower_head]);
        self.steps += 1;
    }

    /// Exchanges upper `h + r*spacing` with lower `h' + r*spacing` for every
    /// `r`, where `h` and `h'` are the current heads.
    pub fn ca_exchange(&mut self, spacing: usize) -> Result<()> {
        let n = self.len();
        if spacing == 0 || !n.is_multiple_of(spacing) {
            return Err(Error::Spacing { spacing, len: n });
        }
        for r in 0..n / spacing {
            let (u, l) = ((self.upper_head + r * spacing) % n, (self.lower_head + r * spacing) % n);
            std::mem::swap(&mut self.upper[u], &mut self.lower[l]);
        }
        self.steps += 1;
        Ok(())
    }
}

fn shorter(from: usize, to: usize, n: usize) -> Direction {
    if (to + n - from) % n <= n / 2 {
        Direction::Right
    } else {
        Direction::Left
    }
}

/// Cells `r*b + s` move to `((r + s) mod B)*b + s` for the first `B*b` cells,
/// `B = n / b`, using column sweeps. About `n^{4/3}` pulses when `b ~ n^{1/3}`.
pub fn two_tape_stride(bits: &[Bit], b: usize) -> Result<(Vec<Bit>, u64)> {
    stride_impl(bits, b, false)
}

/// The same permutation with head atoms every `b` cells: each column moves
/// with two simultaneous exchanges. Linear in `n`.
pub fn two_tape_stride_ca(bits: &[Bit], b: usize) -> Result<(Vec<Bit>, u64)> {
    stride_impl(bits, b, true)
}

fn stride_impl(bits: &[Bit], b: usize, ca: bool) -> Result<(Vec<Bit>, u64)> {
    if b == 0 || b > bits.len() {
        return Err(Error::InvalidParameter(format!("block size {b} for {} bits", bits.len())));
    }
    let blocks = bits.len() / b;
    let m = blocks * b;
    let mut t = TwoTapeMachine::new(bits[..m].to_vec())?;
    for s in 0..b {
        if ca {
            t.seek_upper(s);
            t.seek_lower(s);
            t.ca_exchange(b)?;
            t.seek_lower((s + m - s * b) % m);
            t.ca_exchange(b)?;
        } else {
            for r in 0..blocks {
                t.seek_upper(r * b + s);
                t.seek_lower(r * b + s);
                t.exchange();
            }
            for r in 0..blocks {
                let dst = ((r + s) % blocks) * b + s;
                t.seek_upper(dst);
                t.seek_lower((r * b + s) % m);
                t.exchange();
            }
        }
    }
    t.seek_upper(0);
    t.seek_lower(0);
    let mut out = t.upper.clone();
    out.extend_from_slice(&bits[m..]);
    Ok((out, t.steps))
}

/// Collects the cells of `segments` (start, len) into a contiguous prefix of
/// the lower tape in one pass. Returns the gathered bits and the pulse count.
pub fn two_tape_gather(bits: &[Bit], segments: &[(usize, usize)]) -> Result<(Vec<Bit>, u64)> {
    let mut t = TwoTapeMachine::new(bits.to_vec())?;
    let mut count = 0;
    for &(start, len) in segments {
        if start + len > bits.len() {
            return Err(Error::InvalidParameter(format!("segment {start}+{len} exceeds {} bits", bits.len())));
        }
        for i in start..start + len {
            while t.upper_head < i {
                t.rotate_upper(Direction::Right);
            }
            if t.upper_head != i {
                return Err(Error::InvalidParameter("segments must be sorted and disjoint".into()));
            }
            t.exchange();
            t.rotate_lower(Direction::Right);
            count += 1;
        }
    }
    Ok((t.lower[..count].to_vec(), t.steps))
}

/// Pulse count of [`two_tape_gather`] without moving any data.
pub fn two_tape_gather_cost(n: usize, segments: &[(usize, usize)]) -> Result<u64> {
    let mut head = 0;
    let mut count = 0u64;
    for &(start, len) in segments {
        if start + len > n || (len > 0 && start < head) {
            return Err(Error::InvalidParameter(format!("segment {start}+{len} is out of order or exceeds {n} cells")));
        }
        if len > 0 {
            head = start + len - 1;
            count += len as u64;
        }
    }
    Ok(head as u64 * ROTATION_PULSES + count * (1 + ROTATION_PULSES))
}
