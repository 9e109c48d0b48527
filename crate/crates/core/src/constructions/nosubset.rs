//! A c.e. set of density 1 with no computable subset of density 1.
//!
//! Each slice `R_e` is built on its own. While `W_{e,s+1} ∪ A_{e,s}` fails to
//! cover `R_e↾r(e,s)`, one more element of `R_e` above the restraint goes
//! into `A`. Once it covers, all of `R_e↾r(e,s)` goes in and the restraint
//! moves to the least larger element of `R_e` at which `A` holds at most
//! half of `R_e↾r`.

use alloc::vec::Vec;

use super::{prefix_of_slices, Construction, ConstructionState, DomainCursor, Event, EventKind, SliceSet};
use crate::machines::MachineUniverse;

/// One restraint increase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpRecord {
    pub stage: u64,
    pub slice: u64,
    pub old_restraint: u64,
    pub new_restraint: u64,
    /// `|R_e↾old_restraint|`.
    pub covered: u64,
    /// Members of `A` among them before the dump.
    pub in_set_before: u64,
}

struct Slice {
    e: u32,
    r_pos: u64,
    set: SliceSet,
    cursor: DomainCursor,
    feed: u64,
    full_below: u64,
    stuck: bool,
}

pub struct NoSubsetConstruction {
    stage: u64,
    slices: Vec<Slice>,
    jumps: Vec<JumpRecord>,
    log: bool,
    events: Vec<Event>,
}

impl NoSubsetConstruction {
    pub fn new(universe: &MachineUniverse, machines: u64) -> Self {
        let slices = (0..machines.min(64) as u32)
            .map(|e| Slice {
                e,
                r_pos: 0,
                set: SliceSet::new(e),
                cursor: DomainCursor::new(e, universe.machine(e as u64)),
                feed: 1,
                full_below: 0,
                stuck: false,
            })
            .collect();
        NoSubsetConstruction { stage: 0, slices, jumps: Vec::new(), log: false, events: Vec::new() }
    }

    pub fn with_events(mut self) -> Self {
        self.log = true;
        self
    }

    /// `r(e, stage)`; the initial value is `2^e`.
    pub fn restraint(&self, e: u64) -> Option<u64> {
        let sl = self.slices.get(e as usize)?;
        sl.set.element(sl.r_pos)
    }

    pub fn jumps(&self) -> &[JumpRecord] {
        &self.jumps
    }

    pub fn slice_count(&self) -> u64 {
        self.slices.len() as u64
    }

    /// `A ∩ [0, bound)`.
    pub fn prefix(&self, bound: u64) -> crate::NatSetPrefix {
        prefix_of_slices(self.slices.iter().map(|s| &s.set), bound)
    }
}

impl Slice {
    fn act(&mut self, s: u64, jumps: &mut Vec<JumpRecord>, events: Option<&mut Vec<Event>>) {
        if self.stuck {
            return;
        }
        let set = &self.set;
        let filled = self.cursor.covered(self.r_pos, s + 1, |p| set.contains(p), |_, _| {});
        let restraint_now = |sl: &Slice| sl.set.element(sl.r_pos);
        let mut log = events;
        if !filled {
            let mut p = self.feed.max(self.r_pos + 1);
            while self.set.contains(p) {
                p += 1;
            }
            if let Some(m) = self.set.element(p) {
                self.set.insert(p);
                self.feed = p + 1;
                if let Some(ev) = log.as_deref_mut() {
                    ev.push(Event { stage: s, slice: self.e as u64, kind: EventKind::Enter, value: m, restraint: restraint_now(self) });
                }
            }
            return;
        }
        let old_pos = self.r_pos;
        let before = self.set.count_through(old_pos);
        for p in self.full_below..=old_pos {
            if !self.set.contains(p) {
                self.set.insert(p);
                if let Some(ev) = log.as_deref_mut() {
                    let m = self.set.element(p).unwrap_or(0);
                    ev.push(Event { stage: s, slice: self.e as u64, kind: EventKind::Enter, value: m, restraint: restraint_now(self) });
                }
            }
        }
        self.full_below = old_pos + 1;
        // least p > old_pos with |A ∩ R_e↾f(p)| ≤ (p+1)/2
        let mut count = old_pos + 1;
        let mut p = old_pos;
        loop {
            p += 1;
            if self.set.element(p).is_none() {
                self.stuck = true;
                return;
            }
            if self.set.contains(p) {
                count += 1;
            }
            if 2 * count <= p + 1 {
                break;
            }
        }
        self.r_pos = p;
        self.feed = p + 1;
        let (old_r, new_r) = (self.set.element(old_pos).unwrap_or(0), self.set.element(p).unwrap_or(0));
        jumps.push(JumpRecord {
            stage: s,
            slice: self.e as u64,
            old_restraint: old_r,
            new_restraint: new_r,
            covered: old_pos + 1,
            in_set_before: before,
        });
        if let Some(ev) = log {
            ev.push(Event { stage: s, slice: self.e as u64, kind: EventKind::Restraint, value: new_r, restraint: Some(new_r) });
        }
    }
}

impl Construction for NoSubsetConstruction {
    fn stage(&self) -> u64 {
        self.stage
    }

    fn step(&mut self) {
        let s = self.stage;
        let active = (s + 1).min(self.slices.len() as u64) as usize;
        for sl in self.slices.iter_mut().take(active) {
            let ev = if self.log { Some(&mut self.events) } else { None };
            sl.act(s, &mut self.jumps, ev);
        }
        self.stage += 1;
    }

    fn events(&self) -> &[Event] {
        &self.events
    }

    fn take_events(&mut self) -> Vec<Event> {
        core::mem::take(&mut self.events)
    }

    fn state(&self, bound: u64) -> ConstructionState {
        ConstructionState {
            stage: self.stage,
            sets: alloc::vec![("A", self.prefix(bound))],
            restraints: (0..self.slices.len() as u64).filter_map(|e| Some((e, self.restraint(e)?))).collect(),
            met: Vec::new(),
        }
    }
}
