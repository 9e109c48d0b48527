//! Fuel-bounded register machines standing in for `Φ_e`, `Φ_{e,s}` and `W_e`.
//!
//! A step is one executed instruction; an oracle query is one step. `W_{e,s}`
//! follows the usual convention `{x < s : Φ_{e,s}(x)↓}`, so it is finite and
//! monotone in `s`. Plain (unrelativized) evaluation answers every oracle
//! query with 0, i.e. it runs relative to the empty set.

mod program;
mod run;
mod universe;

pub mod adversaries;

use alloc::vec::Vec;
use alloc::collections::{BTreeMap, BinaryHeap};
use core::cmp::Reverse;
use core::convert::Infallible;

pub use program::{Instruction, Program};
pub use run::{Run, Status};
pub use universe::MachineUniverse;

use crate::NatSetPrefix;

/// Outcome of a run under a fuel limit. Out of fuel is a value, not an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuelResult {
    Converged(u64),
    OutOfFuel,
}

impl FuelResult {
    pub fn converged(self) -> Option<u64> {
        match self {
            FuelResult::Converged(v) => Some(v),
            FuelResult::OutOfFuel => None,
        }
    }

    pub fn is_converged(self) -> bool {
        matches!(self, FuelResult::Converged(_))
    }
}

fn empty_oracle(_: u64) -> Result<bool, Infallible> {
    Ok(false)
}

/// A compiled program ready to run.
#[derive(Clone, Debug)]
pub struct Machine {
    compiled: program::Compiled,
}

impl Machine {
    pub fn new(program: &Program) -> Self {
        Machine { compiled: program.compile() }
    }

    pub fn start(&self, x: u64) -> Run {
        Run::new(&self.compiled, x)
    }

    /// Pushes `run` up to `fuel` total steps relative to the empty oracle.
    pub fn advance(&self, run: &mut Run, fuel: u64) -> Status {
        match run.advance(&self.compiled, fuel, &mut empty_oracle, true) {
            Ok(s) => s,
            Err(never) => match never {},
        }
    }

    pub fn advance_oracle<E>(
        &self,
        run: &mut Run,
        fuel: u64,
        oracle: &mut impl FnMut(u64) -> Result<bool, E>,
    ) -> Result<Status, E> {
        run.advance(&self.compiled, fuel, oracle, false)
    }

    /// `Φ_{e,s}(x)`: at most `s` steps.
    pub fn eval(&self, x: u64, s: u64) -> FuelResult {
        let mut run = self.start(x);
        to_fuel_result(self.advance(&mut run, s))
    }

    pub fn eval_oracle<E>(
        &self,
        x: u64,
        s: u64,
        oracle: &mut impl FnMut(u64) -> Result<bool, E>,
    ) -> Result<FuelResult, E> {
        let mut run = self.start(x);
        Ok(to_fuel_result(self.advance_oracle(&mut run, s, oracle)?))
    }

    /// `x ∈ W_{e,s}`.
    pub fn in_stage(&self, x: u64, s: u64) -> bool {
        x < s && self.eval(x, s).is_converged()
    }

    /// `W_{e,s}` as a prefix with bound `s`.
    pub fn we_stage(&self, s: u64) -> NatSetPrefix {
        NatSetPrefix::from_fn(s, |x| self.eval(x, s).is_converged())
    }
}

fn to_fuel_result(status: Status) -> FuelResult {
    match status {
        Status::Halted(v) => FuelResult::Converged(v),
        Status::Running | Status::Diverged => FuelResult::OutOfFuel,
    }
}

/// Which inputs a [`DomainEnumerator`] watches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainFilter {
    All,
    /// Only elements of `R_k`.
    Slice(u32),
    /// Only inputs strictly above the threshold.
    Above(u64),
}

impl DomainFilter {
    fn admits(self, x: u64) -> bool {
        match self {
            DomainFilter::All => true,
            DomainFilter::Slice(k) => crate::partition::in_slice(k, x),
            DomainFilter::Above(t) => x > t,
        }
    }
}

/// Enumerates `W_e` stage by stage: stage `s` yields `W_{e,s} \ W_{e,s−1}`
/// restricted to a filter, in increasing order.
#[derive(Clone, Debug)]
pub struct DomainEnumerator {
    machine: Machine,
    filter: DomainFilter,
    // runs still going, keyed by the stage at which they need more fuel
    running: BinaryHeap<Reverse<(u64, u64)>>,
    runs: BTreeMap<u64, Run>,
    // halted runs waiting for their halting stage
    halted: BinaryHeap<Reverse<(u64, u64)>>,
    stage: u64,
}

impl DomainEnumerator {
    pub fn new(machine: Machine, filter: DomainFilter) -> Self {
        DomainEnumerator {
            machine,
            filter,
            running: BinaryHeap::new(),
            runs: BTreeMap::new(),
            halted: BinaryHeap::new(),
            stage: 0,
        }
    }

    /// Last completed stage.
    pub fn stage(&self) -> u64 {
        self.stage
    }

    /// Inputs below the current stage that have not yet been enumerated and
    /// not been shown divergent.
    pub fn pending(&self) -> usize {
        self.runs.len() + self.halted.len()
    }

    /// Runs stage `s = stage + 1` and returns the newly enumerated elements,
    /// in increasing order.
    ///
    /// Runs are pushed ahead of the stage (to twice it) and halting times are
    /// remembered, so a run is only touched when its fuel is used up.
    pub fn advance(&mut self) -> Vec<u64> {
        self.stage += 1;
        let s = self.stage;
        let x = s - 1;
        if self.filter.admits(x) {
            self.runs.insert(x, self.machine.start(x));
            self.running.push(Reverse((0, x)));
        }
        while let Some(&Reverse((due, x))) = self.running.peek() {
            if due >= s {
                break;
            }
            self.running.pop();
            let run = self.runs.get_mut(&x).expect("scheduled run exists");
            match self.machine.advance(run, s.saturating_mul(2)) {
                Status::Halted(_) => {
                    let at = run.steps().max(x + 1);
                    self.runs.remove(&x);
                    self.halted.push(Reverse((at, x)));
                }
                Status::Diverged => {
                    self.runs.remove(&x);
                }
                Status::Running => self.running.push(Reverse((run.steps(), x))),
            }
        }
        let mut found = Vec::new();
        while let Some(&Reverse((at, x))) = self.halted.peek() {
            if at > s {
                break;
            }
            self.halted.pop();
            found.push(x);
        }
        found.sort_unstable();
        found
    }
}

/// Fair interleaving of several `W_e`: for `s = 1..=budget`, for each index
/// in the given order, the elements of `W_{e,s} \ W_{e,s−1}` in increasing
/// order. The output is exactly `{(e, x) : x ∈ W_{e,budget}}`.
pub fn dovetail(universe: &MachineUniverse, indices: &[u64], budget: u64) -> Vec<(u64, u64)> {
    let mut enums: Vec<(u64, DomainEnumerator)> = indices
        .iter()
        .map(|&e| (e, DomainEnumerator::new(universe.machine(e), DomainFilter::All)))
        .collect();
    let mut out = Vec::new();
    for _ in 0..budget {
        for (e, en) in enums.iter_mut() {
            out.extend(en.advance().into_iter().map(|x| (*e, x)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn eval_examples() {
        let u = MachineUniverse::canonical()
            .with_program(0, "zero", adversaries::constant(0))
            .with_program(1, "never", adversaries::never())
            .with_program(2, "parity", adversaries::parity());
        for x in 0..20 {
            assert_eq!(u.eval(0, x, 1), FuelResult::Converged(0));
            assert_eq!(u.eval(1, x, 1000), FuelResult::OutOfFuel);
        }
        assert_eq!(u.eval(0, 3, 0), FuelResult::OutOfFuel);
        // 6 → 5 → 4 … alternating DJZ; run it generously
        assert_eq!(u.eval(2, 6, 100), FuelResult::Converged(1));
        assert_eq!(u.eval(2, 7, 100), FuelResult::Converged(0));
    }

    #[test]
    fn parity_takes_linear_time() {
        let m = Machine::new(&adversaries::parity());
        // steps: 3 per pair of decrements, then the exit DJZ and OUT
        let mut run = m.start(6);
        assert_eq!(m.advance(&mut run, 1000), Status::Halted(1));
        assert_eq!(run.steps(), 11);
        assert_eq!(m.eval(6, 10), FuelResult::OutOfFuel);
        assert_eq!(m.eval(6, 11), FuelResult::Converged(1));
    }

    #[test]
    fn we_stage_examples() {
        let never = Machine::new(&adversaries::never());
        for s in 0..30 {
            assert!(never.we_stage(s).is_empty());
        }
        let total = Machine::new(&adversaries::constant(0));
        assert_eq!(total.we_stage(10), NatSetPrefix::full(10));
        let above = Machine::new(&adversaries::above(25));
        let w = above.we_stage(40);
        assert_eq!(w.iter().collect::<Vec<_>>(), (26..40).collect::<Vec<_>>());
    }

    #[test]
    fn oracle_examples() {
        let evens = |x: u64| Ok::<_, ()>(x % 2 == 0);
        let m = Machine::new(&adversaries::oracle_identity());
        assert_eq!(m.eval_oracle(4, 10, &mut { evens }), Ok(FuelResult::Converged(1)));
        assert_eq!(m.eval_oracle(3, 10, &mut { evens }), Ok(FuelResult::Converged(0)));

        let r = Machine::new(&adversaries::r_membership());
        let two = |k: u64| Ok::<_, ()>(k == 2);
        assert_eq!(r.eval_oracle(12, 500, &mut { two }), Ok(FuelResult::Converged(1)));
        for x in 0..200u64 {
            let want = x != 0 && x.trailing_zeros() == 2;
            assert_eq!(
                r.eval_oracle(x, 10_000, &mut { two }),
                Ok(FuelResult::Converged(want as u64)),
                "x={x}"
            );
        }
        let failing = |_: u64| Err::<bool, _>("down");
        assert_eq!(m.eval_oracle(1, 10, &mut { failing }), Err("down"));
    }

    #[test]
    fn fuel_monotonicity_on_canonical_programs() {
        let u = MachineUniverse::canonical();
        for e in 0..400u64 {
            for x in 0..6 {
                let mut first = None;
                for s in 0..60 {
                    let r = u.eval(e, x, s);
                    if let Some(v) = first {
                        assert_eq!(r, FuelResult::Converged(v), "e={e} x={x} s={s}");
                    } else if let FuelResult::Converged(v) = r {
                        first = Some(v);
                    }
                }
            }
        }
    }

    #[test]
    fn divergence_certificates_agree_with_long_runs() {
        // a certified-divergent run must not halt when simply run much longer
        let u = MachineUniverse::canonical();
        for e in 0..3000u64 {
            let p = u.program(e);
            let m = Machine::new(&p);
            for x in 0..4 {
                let mut run = m.start(x);
                if m.advance(&mut run, 5_000) == Status::Diverged {
                    let plain = plain_interpret(&p, x, 50_000);
                    assert_eq!(plain, None, "e={e} x={x} halted but was certified divergent");
                }
            }
        }
    }

    fn plain_interpret(p: &Program, x: u64, fuel: u64) -> Option<u64> {
        plain_halting(p, x, fuel).map(|(v, _)| v)
    }

    /// Independent reference interpreter without any loop detection:
    /// output and number of executed steps.
    fn plain_halting(p: &Program, x: u64, fuel: u64) -> Option<(u64, u64)> {
        use alloc::collections::BTreeMap;
        let ins = p.instructions();
        let mut regs: BTreeMap<u64, u64> = BTreeMap::new();
        regs.insert(0, x);
        let mut pc = 0u64;
        for step in 0..fuel {
            if pc as usize >= ins.len() {
                return Some((regs[&0], step));
            }
            match ins[pc as usize] {
                Instruction::Inc(r) => {
                    *regs.entry(r).or_insert(0) += 1;
                    pc += 1;
                }
                Instruction::Djz(r, t) => {
                    let v = regs.entry(r).or_insert(0);
                    if *v == 0 {
                        pc = t;
                    } else {
                        *v -= 1;
                        pc += 1;
                    }
                }
                Instruction::Jmp(t) => pc = t,
                Instruction::Out(v) => return Some((v, step + 1)),
                Instruction::Qry(r) => {
                    regs.insert(r, 0);
                    pc += 1;
                }
            }
        }
        if pc as usize >= ins.len() {
            return Some((regs[&0], fuel));
        }
        None
    }

    #[test]
    fn halting_times_are_exact() {
        // loop summarizing must not change when a run halts
        let u = MachineUniverse::canonical();
        for e in 0..3000u64 {
            let p = u.program(e);
            let m = Machine::new(&p);
            for x in [0, 1, 2, 5, 17, 40] {
                match plain_halting(&p, x, 4_000) {
                    Some((v, h)) => {
                        assert_eq!(m.eval(x, h), FuelResult::Converged(v), "e={e} x={x}");
                        if h > 0 {
                            assert_eq!(m.eval(x, h - 1), FuelResult::OutOfFuel, "e={e} x={x}");
                        }
                    }
                    None => assert_eq!(m.eval(x, 4_000), FuelResult::OutOfFuel, "e={e} x={x}"),
                }
            }
        }
    }

    #[test]
    fn countdown_loops_are_summarized() {
        // x passes of a two-instruction loop, then a zero loop
        let p = Program::new(vec![Instruction::Djz(0, 0), Instruction::Jmp(0)]);
        let m = Machine::new(&p);
        let mut run = m.start(1 << 40);
        assert_eq!(m.advance(&mut run, 1 << 43), Status::Diverged);
        let q = Program::new(vec![Instruction::Djz(0, 2), Instruction::Jmp(0)]);
        let m = Machine::new(&q);
        assert_eq!(m.eval(1 << 40, (1 << 41) + 1), FuelResult::Converged(0));
        assert_eq!(m.eval(1 << 40, 1 << 41), FuelResult::OutOfFuel);
    }

    #[test]
    fn stage_monotonicity() {
        let u = MachineUniverse::standard();
        for e in 0..40u64 {
            let m = u.machine(e);
            let mut prev = m.we_stage(0);
            for s in 1..40 {
                let cur = m.we_stage(s);
                assert!(prev.iter().all(|x| cur.contains(x).unwrap()), "e={e} s={s}");
                prev = cur;
            }
        }
    }

    #[test]
    fn enumerator_matches_we_stage() {
        let u = MachineUniverse::standard();
        for e in 0..300u64 {
            let m = u.machine(e);
            let mut en = DomainEnumerator::new(m.clone(), DomainFilter::All);
            let mut seen = NatSetPrefix::empty(80);
            for s in 1..80 {
                for x in en.advance() {
                    seen.insert(x).unwrap();
                }
                assert_eq!(seen.restrict(s), m.we_stage(s), "e={e} s={s}");
            }
        }
    }

    #[test]
    fn dovetail_examples() {
        let u = MachineUniverse::canonical()
            .with_program(0, "zero", adversaries::constant(0))
            .with_program(1, "never", adversaries::never())
            .with_program(2, "above", adversaries::above(3))
            .with_program(3, "evens", adversaries::evens_domain());
        let d = dovetail(&u, &[0], 5);
        assert_eq!(d, vec![(0, 0), (0, 1), (0, 2), (0, 3), (0, 4)]);
        assert!(dovetail(&u, &[1], 50).is_empty());

        let budget = 30;
        let d = dovetail(&u, &[2, 3], budget);
        let mut expected: Vec<(u64, u64)> = Vec::new();
        for e in [2u64, 3] {
            expected.extend(u.we_stage(e, budget).iter().map(|x| (e, x)));
        }
        let mut got = d.clone();
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
        assert_eq!(d, dovetail(&u, &[2, 3], budget));
    }
}
