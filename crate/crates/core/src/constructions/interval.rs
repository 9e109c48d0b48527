//! Interval diagonalization against total 0/1 machines.
//!
//! `B` is decided on the intervals `[2^j, 2^{j+1})` in order, `0 ∉ B`.
//! Requirement `P_{e,k}` wants some `j ≥ k` where `B` disagrees with `Φ_e` on
//! the whole interval. On interval `j` the least unmet `⟨e,k⟩ ≤ j` with
//! `k ≤ j` whose `Φ_{e,f(j)}` converges on the entire interval acts; if none
//! does, `B` is empty there.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::eop::pairing::{pair, unpair};
use crate::machines::{FuelResult, Machine, MachineUniverse};
use crate::NatSetPrefix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalOutcome {
    /// `B ∩ [0, 2^{j_max+1})`.
    pub set: NatSetPrefix,
    /// `(j, e, k)` for every interval where `P_{e,k}` received attention.
    pub attentions: Vec<(u32, u64, u64)>,
}

/// Builds `B` through interval `j_max` (at most 62) against `Φ_0 … Φ_{machines−1}`.
pub fn interval_diagonalization(
    f: impl Fn(u32) -> u64,
    universe: &MachineUniverse,
    machines: u64,
    j_max: u32,
) -> IntervalOutcome {
    let j_max = j_max.min(62);
    let bound = 1u64 << (j_max + 1);
    let mut set = NatSetPrefix::empty(bound);
    let mut met: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut attentions = Vec::new();
    let programs: Vec<Machine> = (0..machines).map(|e| universe.machine(e)).collect();
    for j in 0..=j_max {
        let fuel = f(j);
        let lo = 1u64 << j;
        let hi = lo << 1;
        // per e: outputs on the interval, if all converge within the fuel
        let mut cache: Vec<Option<Option<Vec<u64>>>> = alloc::vec![None; programs.len()];
        for code in 0..=j as u64 {
            let (e, k) = unpair(code);
            debug_assert_eq!(pair(e, k), Some(code));
            if e >= machines || k > j as u64 || met.contains(&(e, k)) {
                continue;
            }
            let outputs = cache[e as usize].get_or_insert_with(|| {
                (lo..hi)
                    .map(|x| match programs[e as usize].eval(x, fuel) {
                        FuelResult::Converged(v) => Some(v),
                        FuelResult::OutOfFuel => None,
                    })
                    .collect::<Option<Vec<u64>>>()
            });
            if let Some(outs) = outputs {
                for (x, &v) in (lo..hi).zip(outs.iter()) {
                    if v == 0 {
                        let _ = set.insert(x);
                    }
                }
                met.insert((e, k));
                attentions.push((j, e, k));
                break;
            }
        }
    }
    IntervalOutcome { set, attentions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::adversaries;

    #[test]
    fn divergent_universe_gives_empty_set() {
        let mut u = MachineUniverse::canonical();
        for e in 0..8 {
            u.set_program(e, "never", adversaries::never());
        }
        let out = interval_diagonalization(|j| 1 << (j + 4), &u, 8, 12);
        assert!(out.set.is_empty());
        assert!(out.attentions.is_empty());
    }

    #[test]
    fn constant_zero_forces_a_full_interval() {
        let u = MachineUniverse::canonical().with_program(0, "const0", adversaries::constant(0));
        let out = interval_diagonalization(|j| 1 << (j + 4), &u, 1, 10);
        let full = (0..=10u32).any(|j| ((1u64 << j)..(2u64 << j)).all(|x| out.set.contains(x).unwrap()));
        assert!(full);
        assert!(!out.set.contains(0).unwrap());
    }

    #[test]
    fn attention_at_most_once_and_disagreement() {
        let u = MachineUniverse::standard();
        let out = interval_diagonalization(|j| 1 << (j + 3), &u, 16, 13);
        let mut seen = BTreeSet::new();
        for &(j, e, k) in &out.attentions {
            assert!(seen.insert((e, k)), "P_({e},{k}) acted twice");
            assert!(k <= j as u64 && pair(e, k).unwrap() <= j as u64);
            let m = u.machine(e);
            for x in (1u64 << j)..(2u64 << j) {
                let v = m.eval(x, 1 << (j + 3)).converged().unwrap();
                assert_ne!(v, out.set.contains(x).unwrap() as u64, "j={j} e={e} x={x}");
            }
        }
    }
}
