use fathit_core::adversary::{play_game, RandomOpponent};
use fathit_core::engine::{EngineConfig, EngineState, HistoryMode, HitIndex};
use fathit_core::geometry::{grid_points_in, object_level, point_level};
use fathit_core::harness::{base_shape, gen_random, GenParams, InstanceFile};
use fathit_core::oracle::{min_hitting_set, verify_hitting_set, DEFAULT_BUDGET};
use fathit_core::{Fatness, GridSpec, Rational, ShapeKind};
use proptest::prelude::*;

fn instance(seed: u64, n: i64, root2: bool, count: usize) -> InstanceFile<Rational> {
    let (alpha, shapes) = if root2 {
        (Fatness::sqrt_of(2).unwrap(), vec![ShapeKind::Ball, ShapeKind::Cube, ShapeKind::Box])
    } else {
        (Fatness::one(), vec![ShapeKind::Cube])
    };
    gen_random(&GenParams {
        d: 2,
        n,
        alpha,
        shapes,
        count,
        seed,
        max_width: Some(n.min(32)),
    })
    .unwrap()
}

fn arb_instance() -> impl Strategy<Value = InstanceFile<Rational>> {
    (any::<u64>(), prop::sample::select(vec![16i64, 64, 100, 256]), any::<bool>(), 1usize..40)
        .prop_map(|(seed, n, root2, count)| instance(seed, n, root2, count))
}

fn feed(inst: &InstanceFile<Rational>, config: EngineConfig) -> EngineState<Rational> {
    let mut e = EngineState::with_config(inst.grid().unwrap(), inst.header.alpha.clone(), config);
    for o in &inst.objects {
        e.process(o).unwrap();
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_object_is_hit_and_steps_are_bounded(inst in arb_instance()) {
        let e = feed(&inst, EngineConfig::default());
        prop_assert!(verify_hitting_set(&inst.objects, e.hitting_set()));
        for s in e.history() {
            prop_assert!(s.decision.added().len() as u64 <= e.step_bound());
            // added points sit inside the object that caused them
            prop_assert!(s.decision.added().iter().all(|p| s.object.contains(p.coords())));
        }
        prop_assert!(u64::from(e.max_counter()) <= e.step_bound());
        prop_assert_eq!(e.history().last().map_or(0, |s| s.cumulative_size), e.hitting_set().len());
    }

    #[test]
    fn added_points_share_the_object_level(inst in arb_instance()) {
        let e = feed(&inst, EngineConfig::default());
        let grid = *e.grid();
        for s in e.history() {
            if let fathit_core::engine::Decision::Added { level, points } = &s.decision {
                prop_assert_eq!(*level, object_level(&grid, &s.object).unwrap());
                let all: Vec<_> = grid_points_in(&grid, &s.object)
                    .into_iter()
                    .filter(|p| point_level(p.coords()).unwrap() == *level)
                    .collect();
                prop_assert_eq!(points, &all);
            }
        }
    }

    #[test]
    fn hit_indexes_agree(inst in arb_instance()) {
        let linear = feed(&inst, EngineConfig::default());
        let grid = feed(&inst, EngineConfig { hit_index: HitIndex::Grid, ..Default::default() });
        prop_assert_eq!(linear.history(), grid.history());
    }

    #[test]
    fn counts_only_mode_keeps_the_same_set(inst in arb_instance()) {
        let full = feed(&inst, EngineConfig::default());
        let lean = feed(&inst, EngineConfig {
            history: HistoryMode::CountsOnly,
            instrument: false,
            ..Default::default()
        });
        prop_assert_eq!(full.hitting_set(), lean.hitting_set());
        prop_assert!(lean.history().is_empty());
        prop_assert_eq!(full.processed(), lean.processed());
        prop_assert_eq!(full.unhit_count(), lean.unhit_count());
    }

    #[test]
    fn replay_reproduces_the_run(inst in arb_instance()) {
        let e = feed(&inst, EngineConfig::default());
        let again = EngineState::replay(*e.grid(), e.alpha().clone(), e.history()).unwrap();
        prop_assert_eq!(e.history(), again.history());
        prop_assert_eq!(e.hitting_set(), again.hitting_set());
    }

    #[test]
    fn optimum_never_exceeds_online(seed in any::<u64>(), root2 in any::<bool>(), count in 1usize..16) {
        let inst = instance(seed, 64, root2, count);
        let e = feed(&inst, EngineConfig::default());
        let opt = min_hitting_set(&inst.grid().unwrap(), &inst.objects, DEFAULT_BUDGET).unwrap();
        prop_assert!(verify_hitting_set(&inst.objects, &opt.points));
        prop_assert!(opt.lower_bound <= opt.size());
        if opt.exact {
            prop_assert!(opt.size() <= e.hitting_set().len());
        }
    }

    #[test]
    fn doubling_raises_the_level(x in 1i64..500, y in 1i64..500) {
        let l = point_level(&[x, y]).unwrap();
        prop_assert_eq!(point_level(&[2 * x, 2 * y]).unwrap(), l + 1);
        prop_assert!(x % (1 << l) == 0 && y % (1 << l) == 0);
    }

    #[test]
    fn game_invariants_hold_against_any_opponent(
        seed in any::<u64>(),
        log_n in 4u32..11,
        shape in prop::sample::select(vec![ShapeKind::Cube, ShapeKind::Ball, ShapeKind::Box]),
    ) {
        let grid = GridSpec::new(2, 1 << log_n).unwrap();
        let mut opp = RandomOpponent::new(grid, seed);
        let s = play_game(grid, base_shape(2, shape).unwrap(), &mut opp).unwrap();
        prop_assert!(s.nested);
        prop_assert!(s.recurrence_holds);
        prop_assert!(s.certificate_valid);
        prop_assert!(s.bound_met, "{} points, bound {}", s.total_points, s.bound);
    }
}
