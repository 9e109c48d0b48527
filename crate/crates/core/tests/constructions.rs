use densework_core::constructions::{
    Construction, DiagonalConstruction, EventKind, GenericPairConstruction, NoSubsetConstruction,
    SimpleConstruction,
};
use densework_core::density::prefix_density;
use densework_core::generic::{
    coarse_from_limit, decode_from_coarse, densely_approximable_report, generic_from_pair,
    generic_similarity_verdict, slice_density, Enumeration, StabilizingApprox,
};
use densework_core::machines::{adversaries, MachineUniverse};
use densework_core::partition::in_slice;
use densework_core::{ratio, NatSetPrefix};
use proptest::prelude::*;

#[test]
fn generic_pair_union_is_nearly_everything() {
    let u = MachineUniverse::standard();
    let mut c = GenericPairConstruction::new(&u, 64).with_events();
    let mut first = Vec::new();
    let mut second = Vec::new();
    for _ in 0..100_000 {
        c.step();
        for ev in c.take_events() {
            match ev.kind {
                EventKind::EnterFirst => first.push((ev.stage, ev.value)),
                EventKind::EnterSecond => second.push((ev.stage, ev.value)),
                _ => {}
            }
        }
    }
    let n = 1 << 14;
    let mut c0 = Enumeration::new(first);
    let mut c1 = Enumeration::new(second);
    let report = densely_approximable_report(&mut c0, &mut c1, 100_000, n);
    assert!(report.consistent, "overlap {:?}", report.overlap);
    assert!(report.union_density >= ratio(9, 10), "{}", report.union_density);

    // the pair decides A_1 on everything it lists
    let a1 = c.second(n + 1);
    for x in (0..=n).step_by(7) {
        if let Some(b) = generic_from_pair(&mut c0, &mut c1, x, 100_000).unwrap() {
            assert_eq!(b, a1.contains(x).unwrap(), "x={x}");
        }
    }
}

#[test]
fn diagonal_set_differs_from_co_we_on_its_slice() {
    let u = MachineUniverse::standard();
    let mut c = DiagonalConstruction::new(&u, 64);
    let stages = 100_000;
    c.run(stages);
    let a = c.current();
    let points = [1u64 << 10, 1 << 12, 1 << 14, 1 << 16];
    for e in [0u64, 3, 4, 5] {
        let co_we = u.we_stage(e, stages).complement();
        let report = generic_similarity_verdict(&a, &co_we, &points, &ratio(0, 1)).unwrap();
        let diff = a.symmetric_difference(&co_we);
        for &(n, _) in &report.samples {
            // all of R_e below n lies in the difference
            let on_slice = slice_density(&diff, e as u32, n).unwrap();
            let full = prefix_density(&NatSetPrefix::from_fn(n + 1, |m| in_slice(e as u32, m)), n).unwrap();
            assert_eq!(on_slice, full, "e={e} n={n}");
            assert!(on_slice >= ratio(1, 2 << e) - ratio(1, n + 1));
        }
        assert!(!report.below_threshold);
    }
}

#[test]
fn nosubset_dumps_after_half_is_covered() {
    let u = MachineUniverse::canonical().with_program(3, "omega", adversaries::identity());
    let mut c = NoSubsetConstruction::new(&u, 4);
    c.run(200_000);
    let jumps: Vec<_> = c.jumps().iter().filter(|j| j.slice == 3).collect();
    assert!(jumps.len() >= 3);
    for j in jumps {
        assert!(2 * j.in_set_before <= j.covered, "{j:?}");
        assert!(j.new_restraint > j.old_restraint);
    }
}

#[test]
fn simple_set_meets_total_requirements() {
    let u = MachineUniverse::standard();
    let mut c = SimpleConstruction::new(&u, 64);
    c.run(20_000);
    // the identity machine halts everywhere, so its requirement is met
    assert_eq!(c.chosen(3), Some(10));
    assert_eq!(c.chosen(0), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coarse_round_trip(target in prop::collection::btree_set(0u64..8, 0..8),
                         early in prop::collection::btree_set(0u64..8, 0..8)) {
        let l = StabilizingApprox {
            early: early.into_iter().collect(),
            target: target.iter().copied().collect(),
            stable_at: 100,
        };
        let c = |m: u64| coarse_from_limit(&l, m);
        for n in 0..8u32 {
            prop_assert_eq!(decode_from_coarse(c, n, 1 << 16).unwrap(), target.contains(&(n as u64)));
        }
    }
}
