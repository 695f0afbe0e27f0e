use serde::{Deserialize, Serialize};

use super::{Direction, Primitive, RegisterBit, ReversibleGate};
use crate::{Bit, Error, Result};

/// The cyclic tape, its head offset and the two-bit head register.
///
/// Logical index `i` is the physical cell `(head + i) mod n`; the cell under
/// the head is logical 0. Shifting moves the offset, never the data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapeState {
    cells: Vec<Bit>,
    head: usize,
    register: [Bit; 2],
    steps: u64,
}

impl TapeState {
    pub fn new(bits: Vec<Bit>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyTape);
        }
        Ok(TapeState { cells: bits, head: 0, register: [false; 2], steps: 0 })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn register(&self) -> [Bit; 2] {
        self.register
    }

    pub fn set_register(&mut self, register: [Bit; 2]) {
        self.register = register;
    }

    /// Physical cells, independent of the head offset.
    pub fn physical(&self) -> &[Bit] {
        &self.cells
    }

    pub fn into_physical(self) -> Vec<Bit> {
        self.cells
    }

    fn index(&self, logical: usize) -> usize {
        (self.head + logical) % self.cells.len()
    }

    pub fn cell(&self, logical: usize) -> Bit {
        self.cells[self.index(logical)]
    }

    /// Cells read from the head onwards.
    pub fn logical(&self) -> Vec<Bit> {
        (0..self.len()).map(|i| self.cell(i)).collect()
    }

    pub fn shift(&mut self, direction: Direction) {
        let n = self.cells.len();
        self.head = match direction {
            Direction::Right => (self.head + 1) % n,
            Direction::Left => (self.head + n - 1) % n,
        };
        self.steps += 1;
    }

    /// Applies `gate` to `(cell[head], cell[head+1], y1, y2)`, truncated to
    /// the gate's width.
    pub fn apply_head_gate(&mut self, gate: &ReversibleGate) {
        let i0 = self.index(0);
        let i1 = self.index(1);
        let w = gate.width();
        let full = (self.cells[i0] as u8) << 3 | (self.cells[i1] as u8) << 2 | (self.register[0] as u8) << 1 | self.register[1] as u8;
        let out = gate.apply(full >> (4 - w)) << (4 - w);
        self.cells[i0] = out & 8 != 0;
        self.cells[i1] = out & 4 != 0;
        if w >= 3 {
            self.register[0] = out & 2 != 0;
        }
        if w == 4 {
            self.register[1] = out & 1 != 0;
        }
        self.steps += 1;
    }

    pub fn measure_first(&mut self) -> Bit {
        self.steps += 1;
        self.cell(0)
    }

    /// One pulse applying a width-2 gate to every pair at logical
    /// `(l*k, l*k+1)`.
    pub fn ca_parallel_gate(&mut self, spacing: usize, gate: &ReversibleGate) -> Result<()> {
        let n = self.cells.len();
        if spacing < 2 || !n.is_multiple_of(spacing) {
            return Err(Error::Spacing { spacing, len: n });
        }
        if gate.width() != 2 {
            return Err(Error::GateWidth(gate.width()));
        }
        for l in 0..n / spacing {
            let i0 = self.index(l * spacing);
            let i1 = self.index(l * spacing + 1);
            let out = gate.apply((self.cells[i0] as u8) << 1 | self.cells[i1] as u8);
            self.cells[i0] = out & 2 != 0;
            self.cells[i1] = out & 1 != 0;
        }
        self.steps += 1;
        Ok(())
    }

    pub fn swap_register(&mut self, which: RegisterBit) {
        let i0 = self.index(0);
        let r = &mut self.register[which as usize];
        std::mem::swap(r, &mut self.cells[i0]);
        self.steps += 1;
    }

    /// Executes one primitive. Returns the measured bit for `Measure`.
    pub fn execute(&mut self, op: &Primitive) -> Result<Option<Bit>> {
        match op {
            Primitive::Shift(d) => self.shift(*d),
            Primitive::Gate(g) => self.apply_head_gate(g),
            Primitive::SwapRegister(r) => self.swap_register(*r),
            Primitive::Measure => return Ok(Some(self.measure_first())),
            Primitive::Parallel { spacing, gate } => self.ca_parallel_gate(*spacing, gate)?,
        }
        Ok(None)
    }

    /// Runs `ops` in order and records `(primitive, physical head)` before
    /// each step.
    pub fn run_traced<'a>(&mut self, ops: impl IntoIterator<Item = &'a Primitive>) -> Result<Vec<(Primitive, usize)>> {
        let mut trace = Vec::new();
        for op in ops {
            trace.push((*op, self.head));
            self.execute(op)?;
        }
        Ok(trace)
    }

    pub fn run<'a>(&mut self, ops: impl IntoIterator<Item = &'a Primitive>) -> Result<()> {
        for op in ops {
            self.execute(op)?;
        }
        Ok(())
    }
}
