//! Stage-by-stage simulators for the effective constructions.
//!
//! Every construction is deterministic: its state after `s` calls to
//! [`Construction::step`] depends only on the machine universe, the number
//! of machines taken from it and `s`. At stage `s` the slices (or
//! requirements) with index `e ≤ s` and `e < machines` act, in increasing
//! order of `e`. Stage `s` consults `W_{e,s+1}` / `Φ_{e,s+1}`, following the
//! `x < s` convention for stage-`s` domains.

pub mod delta02;
pub mod diag;
pub mod genpair;
pub mod interval;
pub mod nosubset;
pub mod simple;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::machines::{Machine, Run, Status};
use crate::partition::checked_f_enum;
use crate::{Bitset, NatSetPrefix};

pub use delta02::{delta02_density_set, Delta02Build, RationalSeq};
pub use diag::DiagonalConstruction;
pub use genpair::{GenericPairConstruction, SplitRecord};
pub use interval::{interval_diagonalization, IntervalOutcome};
pub use nosubset::{JumpRecord, NoSubsetConstruction};
pub use simple::SimpleConstruction;

/// What happened in one trace row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    /// The value entered the (single) constructed set.
    Enter,
    /// The value entered `A_0` of a disjoint pair.
    EnterFirst,
    /// The value entered `A_1` of a disjoint pair.
    EnterSecond,
    /// The slice restraint moved to the value.
    Restraint,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Enter => "enter",
            EventKind::EnterFirst => "enter_a0",
            EventKind::EnterSecond => "enter_a1",
            EventKind::Restraint => "restraint",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub stage: u64,
    pub slice: u64,
    pub kind: EventKind,
    pub value: u64,
    /// Restraint of the slice after the event, for constructions that have one.
    pub restraint: Option<u64>,
}

/// Header of [`trace_export`].
pub const TRACE_HEADER: &str = "stage,slice,event,value,restraint";

/// CSV rows `stage,slice,event,value,restraint` in event order, header first.
pub fn trace_export(events: &[Event]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for ev in events {
        let _ = write!(out, "{},{},{},{},", ev.stage, ev.slice, ev.kind.as_str(), ev.value);
        if let Some(r) = ev.restraint {
            let _ = write!(out, "{r}");
        }
        out.push('\n');
    }
    out
}

/// Snapshot of a construction, with sets cut to a prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionState {
    pub stage: u64,
    /// Named constructed sets, each as a prefix.
    pub sets: Vec<(&'static str, NatSetPrefix)>,
    /// `(e, r(e, stage))` for every slice that has acted.
    pub restraints: Vec<(u64, u64)>,
    /// `(e, met)` for constructions with finitary requirements.
    pub met: Vec<(u64, bool)>,
}

impl ConstructionState {
    pub fn set(&self, name: &str) -> Option<&NatSetPrefix> {
        self.sets.iter().find(|(n, _)| *n == name).map(|(_, s)| s)
    }
}

/// A stage-by-stage construction.
pub trait Construction {
    /// Number of completed stages.
    fn stage(&self) -> u64;

    /// Runs the next stage.
    fn step(&mut self);

    fn run(&mut self, stages: u64) {
        for _ in 0..stages {
            self.step();
        }
    }

    /// Events so far; empty unless logging was switched on.
    fn events(&self) -> &[Event];

    /// Hands over the events logged so far, leaving the log empty.
    fn take_events(&mut self) -> Vec<Event>;

    fn state(&self, bound: u64) -> ConstructionState;
}

/// Subset of one slice `R_e`, stored by position `x` of `f_enum(e, x)`.
#[derive(Clone, Debug)]
pub(crate) struct SliceSet {
    e: u32,
    bits: Bitset,
}

impl SliceSet {
    pub(crate) fn new(e: u32) -> Self {
        SliceSet { e, bits: Bitset::new(0) }
    }

    pub(crate) fn element(&self, pos: u64) -> Option<u64> {
        checked_f_enum(self.e, pos)
    }

    pub(crate) fn contains(&self, pos: u64) -> bool {
        pos < self.bits.len() && self.bits.get(pos)
    }

    pub(crate) fn insert(&mut self, pos: u64) {
        if pos >= self.bits.len() {
            self.bits.grow((pos + 1).max(2 * self.bits.len()));
        }
        self.bits.set(pos, true);
    }

    /// Members among positions `0..=pos`.
    pub(crate) fn count_through(&self, pos: u64) -> u64 {
        self.bits.count_below(pos.saturating_add(1))
    }

    pub(crate) fn elements_below(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        self.bits
            .iter_ones()
            .map_while(move |p| checked_f_enum(self.e, p).filter(|&m| m < bound))
    }
}

pub(crate) fn prefix_of_slices<'a>(slices: impl IntoIterator<Item = &'a SliceSet>, bound: u64) -> NatSetPrefix {
    let mut set = NatSetPrefix::empty(bound);
    for s in slices {
        for m in s.elements_below(bound) {
            // in range by construction
            let _ = set.insert(m);
        }
    }
    set
}

/// Walks `R_e` in increasing order checking which elements are in the domain
/// of `Φ_{e,s}`; positions before the cursor are settled for good, so each
/// element is simulated by a single resumable run.
#[derive(Clone, Debug)]
pub(crate) struct DomainCursor {
    e: u32,
    machine: Machine,
    next: u64,
    run: Option<Run>,
}

impl DomainCursor {
    pub(crate) fn new(e: u32, machine: Machine) -> Self {
        DomainCursor { e, machine, next: 0, run: None }
    }

    /// Whether every position `≤ through` is either skipped or in the domain
    /// of `Φ_{e,s}` with the element `< s`. Halting outputs are reported
    /// once per position.
    pub(crate) fn covered(
        &mut self,
        through: u64,
        s: u64,
        mut skip: impl FnMut(u64) -> bool,
        mut on_halt: impl FnMut(u64, u64),
    ) -> bool {
        while self.next <= through {
            let pos = self.next;
            if skip(pos) {
                self.next += 1;
                self.run = None;
                continue;
            }
            let Some(m) = checked_f_enum(self.e, pos) else { return false };
            if m >= s {
                return false;
            }
            let machine = &self.machine;
            let run = self.run.get_or_insert_with(|| machine.start(m));
            match machine.advance(run, s) {
                Status::Halted(v) => {
                    on_halt(pos, v);
                    self.next += 1;
                    self.run = None;
                }
                Status::Running | Status::Diverged => return false,
            }
        }
        true
    }
}
