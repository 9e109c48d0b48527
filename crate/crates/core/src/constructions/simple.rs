//! A simple set of density 0: for each `e`, the first number `> e²` to show
//! up in `W_e` goes into `A`, once.

use alloc::vec::Vec;

use super::{Construction, ConstructionState, Event, EventKind};
use crate::machines::{DomainEnumerator, DomainFilter, MachineUniverse};
use crate::NatSetPrefix;

pub struct SimpleConstruction {
    stage: u64,
    watchers: Vec<Option<DomainEnumerator>>,
    chosen: Vec<Option<u64>>,
    members: Vec<(u64, u64, u64)>,
    log: bool,
    events: Vec<Event>,
}

impl SimpleConstruction {
    pub fn new(universe: &MachineUniverse, machines: u64) -> Self {
        let watchers = (0..machines)
            .map(|e| Some(DomainEnumerator::new(universe.machine(e), DomainFilter::Above(e * e))))
            .collect();
        SimpleConstruction {
            stage: 0,
            watchers,
            chosen: alloc::vec![None; machines as usize],
            members: Vec::new(),
            log: false,
            events: Vec::new(),
        }
    }

    pub fn with_events(mut self) -> Self {
        self.log = true;
        self
    }

    /// The number contributed by requirement `e`, if any yet.
    pub fn chosen(&self, e: u64) -> Option<u64> {
        self.chosen.get(e as usize).copied().flatten()
    }

    /// `(stage, e, element)` in enumeration order.
    pub fn members(&self) -> &[(u64, u64, u64)] {
        &self.members
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        self.members.iter().map(|m| m.2)
    }
}

impl Construction for SimpleConstruction {
    fn stage(&self) -> u64 {
        self.stage
    }

    fn step(&mut self) {
        let s = self.stage;
        let active = (s + 1).min(self.watchers.len() as u64) as usize;
        for e in 0..active {
            let Some(w) = self.watchers[e].as_mut() else { continue };
            let mut found = None;
            while w.stage() < s + 1 {
                if let Some(&x) = w.advance().first() {
                    found = Some(x);
                    break;
                }
            }
            if let Some(x) = found {
                self.watchers[e] = None;
                self.chosen[e] = Some(x);
                self.members.push((s, e as u64, x));
                if self.log {
                    self.events.push(Event { stage: s, slice: e as u64, kind: EventKind::Enter, value: x, restraint: None });
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
        for x in self.elements().filter(|&x| x < bound) {
            let _ = a.insert(x);
        }
        ConstructionState {
            stage: self.stage,
            sets: alloc::vec![("A", a)],
            restraints: Vec::new(),
            met: self.chosen.iter().enumerate().map(|(e, c)| (e as u64, c.is_some())).collect(),
        }
    }
}
