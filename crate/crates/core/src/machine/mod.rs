//! The abstract tape machine: a cyclic tape of bits, a head carrying a
//! two-bit register, and four kinds of primitive, each costing one step.

mod gate;
mod tape;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use gate::ReversibleGate;
pub use tape::TapeState;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// The next cell comes under the head (`SHIFT +1`).
    Right,
    Left,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegisterBit {
    Y1 = 0,
    Y2 = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Primitive {
    Shift(Direction),
    Gate(ReversibleGate),
    SwapRegister(RegisterBit),
    Measure,
    Parallel { spacing: usize, gate: ReversibleGate },
}

impl Primitive {
    pub fn inverse(&self) -> Primitive {
        match *self {
            Primitive::Shift(d) => Primitive::Shift(d.reverse()),
            Primitive::Gate(g) => Primitive::Gate(g.inverse()),
            Primitive::Parallel { spacing, gate } => Primitive::Parallel { spacing, gate: gate.inverse() },
            other => other,
        }
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::Shift(Direction::Right) => f.write_str("SHIFT +1"),
            Primitive::Shift(Direction::Left) => f.write_str("SHIFT -1"),
            Primitive::Gate(g) => write!(f, "GATE {g}"),
            Primitive::SwapRegister(RegisterBit::Y1) => f.write_str("SWAPREG 1"),
            Primitive::SwapRegister(RegisterBit::Y2) => f.write_str("SWAPREG 2"),
            Primitive::Measure => f.write_str("MEASURE"),
            Primitive::Parallel { spacing, gate } => write!(f, "CA {spacing} {gate}"),
        }
    }
}

impl FromStr for Primitive {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognised primitive {line:?}"));
        let words: Vec<&str> = line.split_whitespace().collect();
        Ok(match words.as_slice() {
            ["SHIFT", "+1"] => Primitive::Shift(Direction::Right),
            ["SHIFT", "-1"] => Primitive::Shift(Direction::Left),
            ["GATE", id] => Primitive::Gate(id.parse()?),
            ["SWAPREG", "1"] => Primitive::SwapRegister(RegisterBit::Y1),
            ["SWAPREG", "2"] => Primitive::SwapRegister(RegisterBit::Y2),
            ["MEASURE"] => Primitive::Measure,
            ["CA", k, id] => Primitive::Parallel { spacing: k.parse().map_err(|_| bad())?, gate: id.parse()? },
            _ => return Err(bad()),
        })
    }
}

/// Sink for primitives produced by a program builder.
pub trait Emitter {
    fn emit(&mut self, op: Primitive);

    fn emit_shifts(&mut self, direction: Direction, count: usize) {
        for _ in 0..count {
            self.emit(Primitive::Shift(direction));
        }
    }

    /// `gate`, then `count - 1` times a shift in `direction` followed by
    /// `gate`.
    fn emit_sweep(&mut self, gate: ReversibleGate, direction: Direction, count: usize) {
        for i in 0..count {
            if i > 0 {
                self.emit(Primitive::Shift(direction));
            }
            self.emit(Primitive::Gate(gate));
        }
    }
}

/// Executes directly on the tape.
///
/// # Panics
///
/// On a `CA` pulse whose spacing does not divide the tape length.
impl Emitter for TapeState {
    fn emit(&mut self, op: Primitive) {
        self.execute(&op).expect("invalid parallel pulse for this tape");
    }
}

impl<E: Emitter + ?Sized> Emitter for &mut E {
    fn emit(&mut self, op: Primitive) {
        (**self).emit(op);
    }

    fn emit_shifts(&mut self, direction: Direction, count: usize) {
        (**self).emit_shifts(direction, count);
    }

    fn emit_sweep(&mut self, gate: ReversibleGate, direction: Direction, count: usize) {
        (**self).emit_sweep(gate, direction, count);
    }
}

/// Tracks the head position while emitting, so builders can address cells
/// by absolute index. Addresses are linear: moves never wrap the ring.
#[derive(Debug)]
pub struct Cursor<E> {
    emitter: E,
    pos: usize,
}

impl<E: Emitter> Cursor<E> {
    pub fn new(emitter: E) -> Self {
        Cursor { emitter, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn goto(&mut self, target: usize) {
        if target > self.pos {
            self.emitter.emit_shifts(Direction::Right, target - self.pos);
        } else {
            self.emitter.emit_shifts(Direction::Left, self.pos - target);
        }
        self.pos = target;
    }

    pub fn gate(&mut self, gate: ReversibleGate) {
        self.emitter.emit(Primitive::Gate(gate));
    }

    pub fn gate_at(&mut self, cell: usize, gate: ReversibleGate) {
        self.goto(cell);
        self.gate(gate);
    }

    /// Applies `gate` at every cell from `from` to `to` inclusive, moving
    /// one cell at a time.
    pub fn sweep(&mut self, from: usize, to: usize, gate: ReversibleGate) {
        self.goto(from);
        let direction = if to >= from { Direction::Right } else { Direction::Left };
        self.emitter.emit_sweep(gate, direction, from.abs_diff(to) + 1);
        self.pos = to;
    }

    pub fn swap_register_at(&mut self, cell: usize, which: RegisterBit) {
        self.goto(cell);
        self.emitter.emit(Primitive::SwapRegister(which));
    }

    pub fn emitter(&mut self) -> &mut E {
        &mut self.emitter
    }

    /// Returns the head to cell 0 and hands back the emitter.
    pub fn finish(mut self) -> E {
        self.goto(0);
        self.emitter
    }
}

/// Counts steps without recording them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounter {
    pub shifts: u64,
    pub ops: u64,
}

impl StepCounter {
    pub fn total(&self) -> u64 {
        self.shifts + self.ops
    }
}

impl Emitter for StepCounter {
    fn emit(&mut self, op: Primitive) {
        match op {
            Primitive::Shift(_) => self.shifts += 1,
            _ => self.ops += 1,
        }
    }

    fn emit_shifts(&mut self, _direction: Direction, count: usize) {
        self.shifts += count as u64;
    }

    fn emit_sweep(&mut self, _gate: ReversibleGate, _direction: Direction, count: usize) {
        self.ops += count as u64;
        self.shifts += count.saturating_sub(1) as u64;
    }
}

/// A straight-line program with its declared cost class and the length of
/// the live (data) region it leaves at the front of the tape.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineProgram {
    pub ops: Vec<Primitive>,
    pub cost_class: String,
    pub live_len: Option<usize>,
}

impl Emitter for MachineProgram {
    fn emit(&mut self, op: Primitive) {
        self.ops.push(op);
    }
}

impl MachineProgram {
    pub fn new(cost_class: impl Into<String>) -> Self {
        MachineProgram { ops: Vec::new(), cost_class: cost_class.into(), live_len: None }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn steps(&self) -> StepCounter {
        let mut c = StepCounter::default();
        for op in &self.ops {
            c.emit(*op);
        }
        c
    }

    /// Reversed program with every primitive inverted.
    pub fn inverse(&self) -> Self {
        MachineProgram {
            ops: self.ops.iter().rev().map(Primitive::inverse).collect(),
            cost_class: self.cost_class.clone(),
            live_len: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.cost_class.is_empty() {
            out.push_str(&format!("# cost {}\n", self.cost_class));
        }
        if let Some(live) = self.live_len {
            out.push_str(&format!("# live {live}\n"));
        }
        for op in &self.ops {
            out.push_str(&op.to_string());
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut program = MachineProgram::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(cost) = comment.strip_prefix("cost ") {
                    program.cost_class = cost.trim().to_string();
                } else if let Some(live) = comment.strip_prefix("live ") {
                    program.live_len = Some(live.trim().parse().map_err(|_| err(format!("bad live length {live:?}")))?);
                }
                continue;
            }
            program.ops.push(line.parse().map_err(|e: Error| err(e.to_string()))?);
        }
        Ok(program)
    }
}
