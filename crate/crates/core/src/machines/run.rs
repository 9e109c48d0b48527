use alloc::vec;
use alloc::vec::Vec;

use super::program::{Compiled, Op, HALT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Running,
    Halted(u64),
    /// The run provably never halts (see [`Run`]).
    Diverged,
}

/// A resumable execution of one program on one input.
///
/// Fuel is absolute: `advance(…, s)` brings the run up to `s` executed steps
/// in total, so a run can be pushed forward stage by stage at no extra cost.
///
/// Alongside the plain interpretation the run looks for loops that repeat
/// forever. It snapshots its configuration at steps 1, 2, 4, 8, …; whenever the
/// program counter is back at the snapshot's, it compares registers. If no
/// oracle query happened since the snapshot, every register tested nonzero
/// has not decreased and every register tested zero is unchanged, then
/// replaying the segment from the new configuration takes exactly the same
/// branches and ends in the same relation again, forever. The run is then
/// marked [`Status::Diverged`]. This never changes an answer: a diverged run
/// is one that would be out of fuel at every fuel.
///
/// The same comparison also speeds up counting loops. If the segment since
/// the snapshot left every zero-tested register unchanged, then `k` more
/// passes take the same branches as long as every register tested nonzero
/// stays positive at its tests; those `k` passes are applied in one go, with
/// their exact step cost.
///
/// Under the empty oracle a query just clears its register, which keeps
/// both arguments valid; with a real oracle, segments containing a query are
/// never summarized.
#[derive(Clone, Debug)]
pub struct Run {
    pc: u32,
    regs: Vec<u64>,
    steps: u64,
    status: Status,
    snap_pc: u32,
    snap_regs: Vec<u64>,
    snap_at: u64,
    next_snap: u64,
    // bit 0: tested nonzero since snapshot, bit 1: tested zero
    tested: Vec<u8>,
    // smallest value seen at a nonzero test since the snapshot
    low: Vec<u64>,
    queried: bool,
}

const NONZERO: u8 = 1;
const ZERO: u8 = 2;

impl Run {
    pub(crate) fn new(program: &Compiled, input: u64) -> Run {
        let mut regs = vec![0; program.registers];
        regs[0] = input;
        Run {
            pc: 0,
            snap_regs: regs.clone(),
            tested: vec![0; program.registers],
            low: vec![u64::MAX; program.registers],
            regs,
            steps: 0,
            status: Status::Running,
            snap_pc: 0,
            snap_at: 0,
            next_snap: 1,
            queried: false,
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn status(&self) -> Status {
        self.status
    }

    /// `constant_oracle` promises that the oracle answers 0 everywhere.
    pub(crate) fn advance<E>(
        &mut self,
        program: &Compiled,
        fuel: u64,
        oracle: &mut impl FnMut(u64) -> Result<bool, E>,
        constant_oracle: bool,
    ) -> Result<Status, E> {
        let ops = &program.ops;
        while self.status == Status::Running {
            if self.pc == HALT || self.pc as usize >= ops.len() {
                self.status = Status::Halted(self.regs[0]);
                break;
            }
            if self.steps >= fuel {
                break;
            }
            match ops[self.pc as usize] {
                Op::Inc(r) => {
                    let v = &mut self.regs[r as usize];
                    *v = v.saturating_add(1);
                    self.pc += 1;
                }
                Op::Djz(r, target) => {
                    let v = &mut self.regs[r as usize];
                    if *v == 0 {
                        self.tested[r as usize] |= ZERO;
                        self.pc = target;
                    } else {
                        self.tested[r as usize] |= NONZERO;
                        let low = &mut self.low[r as usize];
                        *low = (*low).min(*v);
                        *v -= 1;
                        self.pc += 1;
                    }
                }
                Op::Jmp(target) => self.pc = target,
                Op::Out(v) => {
                    self.steps += 1;
                    self.status = Status::Halted(v);
                    break;
                }
                Op::Qry(r) => {
                    let v = &mut self.regs[r as usize];
                    *v = oracle(*v)? as u64;
                    self.queried |= !constant_oracle;
                    self.pc += 1;
                }
            }
            self.steps += 1;
            if self.pc == self.snap_pc && self.steps > self.snap_at && !self.queried {
                if self.repeats_forever() {
                    self.status = Status::Diverged;
                    break;
                }
                if self.accelerate(fuel) {
                    self.snapshot();
                    continue;
                }
            }
            if self.steps >= self.next_snap {
                self.snapshot();
            }
        }
        Ok(self.status)
    }

    fn repeats_forever(&self) -> bool {
        if self.queried {
            return false;
        }
        self.regs.iter().zip(&self.snap_regs).zip(&self.tested).all(|((&now, &then), &t)| {
            if t & ZERO != 0 {
                now == then
            } else if t & NONZERO != 0 {
                now >= then
            } else {
                true
            }
        })
    }

    /// Applies as many further passes of the segment since the snapshot as
    /// provably take the same branches and fit in the fuel.
    fn accelerate(&mut self, fuel: u64) -> bool {
        let len = self.steps - self.snap_at;
        let mut k = (fuel - self.steps) / len;
        for (i, (&now, &then)) in self.regs.iter().zip(&self.snap_regs).enumerate() {
            if k == 0 {
                return false;
            }
            let t = self.tested[i];
            if now == then {
                continue;
            }
            if t & ZERO != 0 {
                return false;
            }
            if now > then {
                k = k.min((u64::MAX - now) / (now - then));
            } else if t & NONZERO != 0 {
                // the value at each nonzero test drops by `then - now` per pass
                k = k.min((self.low[i] - 1) / (then - now));
            }
        }
        if k == 0 {
            return false;
        }
        for (now, &then) in self.regs.iter_mut().zip(&self.snap_regs) {
            if *now >= then {
                *now += k * (*now - then);
            } else {
                *now -= k * (then - *now);
            }
        }
        self.steps += k * len;
        true
    }

    fn snapshot(&mut self) {
        self.snap_pc = self.pc;
        self.snap_regs.copy_from_slice(&self.regs);
        self.snap_at = self.steps;
        self.next_snap = self.steps.saturating_mul(2).max(1);
        self.tested.iter_mut().for_each(|t| *t = 0);
        self.low.iter_mut().for_each(|l| *l = u64::MAX);
        self.queried = false;
    }
}
