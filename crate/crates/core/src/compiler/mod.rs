//! Lowers phase rounds to oblivious machine programs.
//!
//! Every program starts and ends with the head on cell 0 and the register
//! clear. Bins are marked in place (the flag cell holds the keep/discard
//! decision), then a compaction moves the data of kept bins, in order, to
//! the front of the tape. Discarded data follows the kept data; flag and
//! header cells end up after the data region, and any trailing partial bin
//! after those.

mod cost;
mod equiv;

pub use cost::{phase1_steps, phase2_steps, phase3_steps};
pub use equiv::{equivalence_check, equivalence_check_with, CheckMode, EquivalenceReport};

use crate::machine::{Cursor, Emitter, MachineProgram, RegisterBit, ReversibleGate};
use crate::{Error, Result};

pub const QUADRATIC: &str = "O(N^2)";

/// Bins of `k` cells: `header` leading cells (including the flag at
/// `flag`), then `k - header` data cells.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub bins: usize,
    pub k: usize,
    pub header: usize,
    pub flag: usize,
}

impl Layout {
    pub fn width(&self) -> usize {
        self.k - self.header
    }

    pub fn data_len(&self) -> usize {
        self.bins * self.width()
    }

    /// Cell of the `t`-th data bit.
    pub fn data_cell(&self, t: usize) -> usize {
        let w = self.width();
        (t / w) * self.k + self.header + t % w
    }
}

/// Moves the data of bins whose flag is not `discard_flag` to the
/// front. Bins are visited last to first; a discarded bin's data is rotated
/// to the end of the data region one cell at a time, with `y1` holding the
/// flag (the swap control) and `y2` carrying the rotated bit. A fixed
/// unshuffle then slides the data cells past the headers.
pub(crate) fn emit_compaction<E: Emitter>(c: &mut Cursor<E>, layout: &Layout, discard_flag: bool) {
    let total = layout.data_len();
    if total == 0 {
        return;
    }
    let w = layout.width();
    let last = total - 1;
    let cswap = ReversibleGate::cswap_y2(discard_flag);
    for b in (0..layout.bins).rev() {
        let flag = b * layout.k + layout.flag;
        c.swap_register_at(flag, RegisterBit::Y1);
        for _ in 0..w {
            for t in (b * w..=last).rev() {
                c.gate_at(layout.data_cell(t), cswap);
            }
            c.gate_at(layout.data_cell(last), cswap);
        }
        c.swap_register_at(flag, RegisterBit::Y1);
    }
    let swap = ReversibleGate::swap();
    for t in 0..total {
        let p = layout.data_cell(t);
        if p > t {
            c.sweep(p - 1, t, swap);
        }
    }
}

pub(crate) fn emit_phase1<E: Emitter>(emitter: E, n: usize) -> E {
    let mut c = Cursor::new(emitter);
    let layout = Layout { bins: n / 2, k: 2, header: 1, flag: 0 };
    for i in 0..layout.bins {
        c.gate_at(2 * i, ReversibleGate::eq());
    }
    emit_compaction(&mut c, &layout, true);
    c.finish()
}

pub(crate) fn emit_phase2<E: Emitter>(emitter: E, n: usize, k: usize) -> E {
    let mut c = Cursor::new(emitter);
    let layout = Layout { bins: n / k, k, header: 1, flag: 0 };
    for b in 0..layout.bins {
        let base = b * k;
        c.swap_register_at(base, RegisterBit::Y1);
        c.sweep(base + 1, base + k - 1, ReversibleGate::parity_y1());
        c.swap_register_at(base, RegisterBit::Y1);
    }
    emit_compaction(&mut c, &layout, true);
    c.finish()
}

/// The counter `(y1, y2)` counts the ones of every cell but the decision
/// cell (cell 2), the decision cell takes `z ^= (y1 OR y2)`, and the count
/// is then undone so the register is clear for the next block.
pub(crate) fn emit_phase3<E: Emitter>(emitter: E, n: usize, k: usize) -> E {
    let mut c = Cursor::new(emitter);
    let layout = Layout { bins: n / k, k, header: 3, flag: 2 };
    for b in 0..layout.bins {
        let base = b * k;
        for j in (0..k).filter(|&j| j != 2) {
            c.gate_at(base + j, ReversibleGate::inc4());
        }
        c.gate_at(base + 2, ReversibleGate::decide());
        for j in (0..k).rev().filter(|&j| j != 2) {
            c.gate_at(base + j, ReversibleGate::dec4());
        }
    }
    emit_compaction(&mut c, &layout, true);
    c.finish()
}

fn finish(mut program: MachineProgram, live: usize) -> MachineProgram {
    program.cost_class = QUADRATIC.into();
    program.live_len = Some(live);
    program
}

/// Pairing round on `n` cells.
pub fn compile_phase1(n: usize) -> Result<MachineProgram> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("phase 1 program needs at least 2 cells, got {n}")));
    }
    Ok(finish(emit_phase1(MachineProgram::default(), n), n / 2))
}

/// Parity-binning round on `n` cells with bins of `k`.
pub fn compile_phase2_round(n: usize, k: usize) -> Result<MachineProgram> {
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!("phase 2 program needs 2 <= k <= n (k={k}, n={n})")));
    }
    Ok(finish(emit_phase2(MachineProgram::default(), n, k), (n / k) * (k - 1)))
}

/// Mod-4 round on `n` cells with blocks of `k`.
pub fn compile_phase3_round(n: usize, k: usize) -> Result<MachineProgram> {
    if k < 4 || k > n {
        return Err(Error::InvalidParameter(format!("phase 3 program needs 4 <= k <= n (k={k}, n={n})")));
    }
    Ok(finish(emit_phase3(MachineProgram::default(), n, k), (n / k) * (k - 3)))
}
