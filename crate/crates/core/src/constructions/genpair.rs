//! Disjoint c.e. sets `A_0`, `A_1` with `A_0 ∪ A_1` of density 1 and `A_1`
//! not coarsely computable.
//!
//! On slice `R_e`: once `Φ_{e,s+1}` converges on all of `R_e↾r(e,s)`, the
//! elements `F` there not yet used are split, `F ∩ Φ_e^{-1}(1)` into `A_0` and
//! the rest into `A_1`, and the restraint moves to the least element of `R_e`
//! at which at most half of `R_e↾r` is used. Otherwise the least element of
//! `R_e` above the restraint not yet in `A_1` goes into `A_1`.

use alloc::vec::Vec;

use super::{prefix_of_slices, Construction, ConstructionState, DomainCursor, Event, EventKind, SliceSet};
use crate::machines::MachineUniverse;
use crate::{Bitset, NatSetPrefix};

/// One split-and-jump action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitRecord {
    pub stage: u64,
    pub slice: u64,
    pub old_restraint: u64,
    pub new_restraint: u64,
    /// `|R_e↾old_restraint|`.
    pub covered: u64,
    /// `|F|`.
    pub split: u64,
    /// `|(Φ_e^{-1}(1) △ A_1) ∩ R_e↾old_restraint|` right after the split.
    pub disagreements: u64,
}

struct Slice {
    e: u32,
    r_pos: u64,
    first: SliceSet,
    second: SliceSet,
    ones: Bitset,
    cursor: DomainCursor,
    feed: u64,
    split_below: u64,
    stuck: bool,
}

pub struct GenericPairConstruction {
    stage: u64,
    slices: Vec<Slice>,
    splits: Vec<SplitRecord>,
    log: bool,
    events: Vec<Event>,
}

impl GenericPairConstruction {
    pub fn new(universe: &MachineUniverse, machines: u64) -> Self {
        let slices = (0..machines.min(64) as u32)
            .map(|e| Slice {
                e,
                r_pos: 0,
                first: SliceSet::new(e),
                second: SliceSet::new(e),
                ones: Bitset::new(0),
                cursor: DomainCursor::new(e, universe.machine(e as u64)),
                feed: 1,
                split_below: 0,
                stuck: false,
            })
            .collect();
        GenericPairConstruction { stage: 0, slices, splits: Vec::new(), log: false, events: Vec::new() }
    }

    pub fn with_events(mut self) -> Self {
        self.log = true;
        self
    }

    pub fn restraint(&self, e: u64) -> Option<u64> {
        let sl = self.slices.get(e as usize)?;
        sl.first.element(sl.r_pos)
    }

    pub fn splits(&self) -> &[SplitRecord] {
        &self.splits
    }

    /// `A_0 ∩ [0, bound)`.
    pub fn first(&self, bound: u64) -> NatSetPrefix {
        prefix_of_slices(self.slices.iter().map(|s| &s.first), bound)
    }

    /// `A_1 ∩ [0, bound)`.
    pub fn second(&self, bound: u64) -> NatSetPrefix {
        prefix_of_slices(self.slices.iter().map(|s| &s.second), bound)
    }
}

impl Slice {
    fn used(&self, p: u64) -> bool {
        self.first.contains(p) || self.second.contains(p)
    }

    fn act(&mut self, s: u64, splits: &mut Vec<SplitRecord>, mut log: Option<&mut Vec<Event>>) {
        if self.stuck {
            return;
        }
        let ones = &mut self.ones;
        let converged = self.cursor.covered(self.r_pos, s + 1, |_| false, |p, v| {
            if v == 1 {
                ones.grow(p + 1);
                ones.set(p, true);
            }
        });
        let e = self.e as u64;
        if !converged {
            let mut p = self.feed.max(self.r_pos + 1);
            while self.second.contains(p) {
                p += 1;
            }
            if let Some(m) = self.second.element(p) {
                self.second.insert(p);
                self.feed = p + 1;
                if let Some(ev) = log.as_deref_mut() {
                    let r = self.first.element(self.r_pos);
                    ev.push(Event { stage: s, slice: e, kind: EventKind::EnterSecond, value: m, restraint: r });
                }
            }
            return;
        }
        let old_pos = self.r_pos;
        let old_r = self.first.element(old_pos).unwrap_or(0);
        let mut split = 0;
        for p in self.split_below..=old_pos {
            if self.used(p) {
                continue;
            }
            split += 1;
            let one = p < self.ones.len() && self.ones.get(p);
            let kind = if one {
                self.first.insert(p);
                EventKind::EnterFirst
            } else {
                self.second.insert(p);
                EventKind::EnterSecond
            };
            if let Some(ev) = log.as_deref_mut() {
                let m = self.first.element(p).unwrap_or(0);
                ev.push(Event { stage: s, slice: e, kind, value: m, restraint: Some(old_r) });
            }
        }
        self.split_below = old_pos + 1;
        let disagreements = (0..=old_pos)
            .filter(|&p| (p < self.ones.len() && self.ones.get(p)) != self.second.contains(p))
            .count() as u64;
        // least p with |used ∩ R_e↾f(p)| ≤ (p+1)/2; everything through old_pos is used
        let mut count = old_pos + 1;
        let mut p = old_pos;
        loop {
            p += 1;
            if self.first.element(p).is_none() {
                self.stuck = true;
                return;
            }
            if self.used(p) {
                count += 1;
            }
            if 2 * count <= p + 1 {
                break;
            }
        }
        self.r_pos = p;
        self.feed = p + 1;
        let new_r = self.first.element(p).unwrap_or(0);
        splits.push(SplitRecord {
            stage: s,
            slice: e,
            old_restraint: old_r,
            new_restraint: new_r,
            covered: old_pos + 1,
            split,
            disagreements,
        });
        if let Some(ev) = log {
            ev.push(Event { stage: s, slice: e, kind: EventKind::Restraint, value: new_r, restraint: Some(new_r) });
        }
    }
}

impl Construction for GenericPairConstruction {
    fn stage(&self) -> u64 {
        self.stage
    }

    fn step(&mut self) {
        let s = self.stage;
        let active = (s + 1).min(self.slices.len() as u64) as usize;
        for sl in self.slices.iter_mut().take(active) {
            let ev = if self.log { Some(&mut self.events) } else { None };
            sl.act(s, &mut self.splits, ev);
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
            sets: alloc::vec![("A0", self.first(bound)), ("A1", self.second(bound))],
            restraints: (0..self.slices.len() as u64).filter_map(|e| Some((e, self.restraint(e)?))).collect(),
            met: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::adversaries;
    use crate::partition::f_enum;

    #[test]
    fn disjoint_at_every_stage() {
        let u = MachineUniverse::standard();
        let mut c = GenericPairConstruction::new(&u, 10);
        for _ in 0..3000 {
            c.step();
            let a0 = c.first(1 << 13);
            let a1 = c.second(1 << 13);
            assert!(a0.intersection(&a1).is_empty(), "stage {}", c.stage());
        }
    }

    #[test]
    fn divergent_slice_behaves_like_positive_rule() {
        let u = MachineUniverse::canonical().with_program(1, "never", adversaries::never());
        let mut c = GenericPairConstruction::new(&u, 2);
        c.run(4000);
        assert_eq!(c.restraint(1), Some(2));
        let union = c.first(6000).union(&c.second(6000));
        for x in 1.. {
            let m = f_enum(1, x);
            if m >= 6000 {
                break;
            }
            assert!(union.contains(m).unwrap());
        }
    }

    #[test]
    fn constant_zero_splits_keep_half_disagreeing() {
        let u = MachineUniverse::canonical().with_program(2, "const0", adversaries::constant(0));
        let mut c = GenericPairConstruction::new(&u, 3);
        c.run(20_000);
        let recs: Vec<_> = c.splits().iter().filter(|r| r.slice == 2).cloned().collect();
        assert!(recs.len() >= 2);
        for r in &recs {
            assert!(2 * r.disagreements >= r.covered, "{r:?}");
            assert!(2 * r.split >= r.covered, "{r:?}");
        }
    }
}
