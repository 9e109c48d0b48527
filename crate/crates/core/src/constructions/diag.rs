//! `A = ⋃_e (W_e ∩ R_e)`: on each slice `A` copies `W_e`, so `A △ co-W_e`
//! contains all of `R_e` and `A` is generically similar to no co-c.e. set.

use alloc::vec::Vec;

use super::{Construction, ConstructionState, Event, EventKind};
use crate::machines::{DomainEnumerator, DomainFilter, MachineUniverse};
use crate::{Bitset, NatSetPrefix};

pub struct DiagonalConstruction {
    stage: u64,
    watchers: Vec<DomainEnumerator>,
    members: Bitset,
    entries: Vec<(u64, u64, u64)>,
    log: bool,
    events: Vec<Event>,
}

impl DiagonalConstruction {
    pub fn new(universe: &MachineUniverse, machines: u64) -> Self {
        let watchers = (0..machines.min(64))
            .map(|e| DomainEnumerator::new(universe.machine(e), DomainFilter::Slice(e as u32)))
            .collect();
        DiagonalConstruction { stage: 0, watchers, members: Bitset::new(0), entries: Vec::new(), log: false, events: Vec::new() }
    }

    pub fn with_events(mut self) -> Self {
        self.log = true;
        self
    }

    /// `(stage, e, element)` in enumeration order.
    pub fn entries(&self) -> &[(u64, u64, u64)] {
        &self.entries
    }

    /// Slices acting so far.
    pub fn active(&self) -> u64 {
        self.stage.min(self.watchers.len() as u64)
    }

    /// `A_s` up to the current stage; every element is below it.
    pub fn current(&self) -> NatSetPrefix {
        let mut bits = self.members.clone();
        bits.grow(self.stage);
        NatSetPrefix::from_bitset(bits)
    }
}

impl Construction for DiagonalConstruction {
    fn stage(&self) -> u64 {
        self.stage
    }

    fn step(&mut self) {
        let s = self.stage;
        self.members.grow(s + 1);
        let active = (s + 1).min(self.watchers.len() as u64) as usize;
        for (e, w) in self.watchers.iter_mut().enumerate().take(active) {
            while w.stage() < s + 1 {
                for x in w.advance() {
                    self.members.set(x, true);
                    self.entries.push((s, e as u64, x));
                    if self.log {
                        self.events.push(Event { stage: s, slice: e as u64, kind: EventKind::Enter, value: x, restraint: None });
                    }
                }
            }
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
        let mut a = NatSetPrefix::empty(bound);
        for x in self.members.iter_ones().take_while(|&x| x < bound) {
            let _ = a.insert(x);
        }
        ConstructionState { stage: self.stage, sets: alloc::vec![("A", a)], restraints: Vec::new(), met: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::in_slice;

    #[test]
    fn slices_copy_domains() {
        let u = MachineUniverse::standard();
        let mut c = DiagonalConstruction::new(&u, 8);
        c.run(300);
        let a = c.current();
        // e = 3 halts everywhere, e = 0 nowhere
        for m in 0..300 {
            if in_slice(3, m) {
                assert!(a.contains(m).unwrap());
            }
            if in_slice(0, m) {
                assert!(!a.contains(m).unwrap());
            }
        }
    }

    #[test]
    fn slice_identity_every_stage() {
        let u = MachineUniverse::standard();
        let mut c = DiagonalConstruction::new(&u, 16);
        for _ in 0..400 {
            c.step();
            let s = c.stage();
            let a = c.current();
            for e in 0..c.active() {
                let w = u.machine(e).we_stage(s);
                for m in (0..s).filter(|&m| in_slice(e as u32, m)) {
                    assert_eq!(a.contains(m).unwrap(), w.contains(m).unwrap(), "s={s} e={e} m={m}");
                }
            }
        }
    }
}
