//! Step counts of the compiled programs, computed without emitting them.
//! Each function follows its builder loop by loop; tests pin them to the
//! emitted programs.

use super::Layout;
use crate::machine::StepCounter;

struct Walk {
    pos: usize,
    steps: StepCounter,
}

impl Walk {
    fn new() -> Self {
        Walk { pos: 0, steps: StepCounter::default() }
    }

    fn goto(&mut self, target: usize) {
        self.steps.shifts += self.pos.abs_diff(target) as u64;
        self.pos = target;
    }

    fn op_at(&mut self, cell: usize) {
        self.goto(cell);
        self.steps.ops += 1;
    }

    /// Ops at `cells` visited in order, `count` of them, ending at `end`,
    /// with the head moving monotonically from `start` to `end`.
    fn sweep(&mut self, start: usize, end: usize, count: usize) {
        self.goto(start);
        self.steps.shifts += start.abs_diff(end) as u64;
        self.steps.ops += count as u64;
        self.pos = end;
    }

    fn finish(mut self) -> StepCounter {
        self.goto(0);
        self.steps
    }
}

fn compaction(walk: &mut Walk, layout: &Layout) {
    let total = layout.data_len();
    if total == 0 {
        return;
    }
    let w = layout.width();
    let last = total - 1;
    for b in (0..layout.bins).rev() {
        let flag = b * layout.k + layout.flag;
        walk.op_at(flag);
        let (lo, hi) = (layout.data_cell(b * w), layout.data_cell(last));
        for _ in 0..w {
            walk.sweep(hi, lo, last - b * w + 1);
            walk.op_at(hi);
        }
        walk.op_at(flag);
    }
    for t in 0..total {
        let p = layout.data_cell(t);
        if p > t {
            walk.sweep(p - 1, t, p - t);
        }
    }
}

pub fn phase1_steps(n: usize) -> StepCounter {
    let mut walk = Walk::new();
    let layout = Layout { bins: n / 2, k: 2, header: 1, flag: 0 };
    if layout.bins > 0 {
        walk.sweep(0, 2 * (layout.bins - 1), layout.bins);
    }
    compaction(&mut walk, &layout);
    walk.finish()
}

pub fn phase2_steps(n: usize, k: usize) -> StepCounter {
    let mut walk = Walk::new();
    let layout = Layout { bins: n / k, k, header: 1, flag: 0 };
    for b in 0..layout.bins {
        let base = b * k;
        walk.op_at(base);
        walk.sweep(base + 1, base + k - 1, k - 1);
        walk.op_at(base);
    }
    compaction(&mut walk, &layout);
    walk.finish()
}

pub fn phase3_steps(n: usize, k: usize) -> StepCounter {
    let mut walk = Walk::new();
    let layout = Layout { bins: n / k, k, header: 3, flag: 2 };
    for b in 0..layout.bins {
        let base = b * k;
        walk.sweep(base, base + k - 1, k - 1);
        walk.op_at(base + 2);
        walk.sweep(base + k - 1, base, k - 1);
    }
    compaction(&mut walk, &layout);
    walk.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{emit_phase1, emit_phase2, emit_phase3};

    #[test]
    fn phase1_matches_emission() {
        for n in 0..80 {
            assert_eq!(phase1_steps(n), emit_phase1(StepCounter::default(), n), "n={n}");
        }
    }

    #[test]
    fn phase2_matches_emission() {
        for n in 2..60 {
            for k in 2..=n.min(13) {
                assert_eq!(phase2_steps(n, k), emit_phase2(StepCounter::default(), n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn phase3_matches_emission() {
        for n in 4..60 {
            for k in 4..=n.min(13) {
                assert_eq!(phase3_steps(n, k), emit_phase3(StepCounter::default(), n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn quadratic_envelope() {
        let mut ratios = Vec::new();
        for n in [8usize, 16, 32, 64, 128, 256, 512] {
            let r = phase1_steps(n).total() as f64 / (n * n) as f64;
            ratios.push(r);
            assert!(r < 2.0, "n={n} ratio={r}");
            assert!(phase2_steps(n, 3).total() as f64 / ((n * n) as f64) < 3.0);
        }
        // The ratio settles rather than growing.
        assert!(ratios[6] / ratios[3] < 1.2, "{ratios:?}");
    }
}
