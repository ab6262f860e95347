//! Differential and structural property tests: every engine against the
//! oracle, and the structures against their own validators.

use dps_core::engine::{Engine, EngineKind};
use dps_core::{tree, Arena, ElementId};
use proptest::prelude::*;

fn value() -> impl Strategy<Value = i64> {
    -1_000_000_000i64..1_000_000_000
}

fn list() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(value(), 1..96)
}

fn engines() -> [EngineKind; 2] {
    [EngineKind::Tt, EngineKind::Ltt]
}

proptest! {
    /// psort equals the sorted prefix for any list and k, on both engines.
    #[test]
    fn psort_matches_oracle_prefix(values in list(), k in 1usize..128) {
        let mut oracle = EngineKind::Oracle.build();
        let ol = oracle.new_list(&values).unwrap();
        let expected = oracle.psort(ol, k).unwrap();
        for kind in engines() {
            let mut engine = kind.build();
            let l = engine.new_list(&values).unwrap();
            let got = engine.psort(l, k).unwrap();
            prop_assert_eq!(&got, &expected, "{} psort diverged", kind.name());
        }
    }

    /// Freshly built structures pass their validators.
    #[test]
    fn builds_validate(values in list()) {
        for kind in engines() {
            let mut engine = kind.build();
            let l = engine.new_list(&values).unwrap();
            let report = engine.validate(l).unwrap();
            prop_assert!(report.ok(), "{}: {:?}", kind.name(), report.violations.first());
        }
    }

    /// Cutting and re-linking reproduces the exact element-id sequence.
    #[test]
    fn cut_then_link_is_identity(values in list(), pos_seed in any::<u64>()) {
        let pos = (pos_seed % values.len() as u64) as usize;
        for kind in engines() {
            let mut engine = kind.build();
            let l = engine.new_list(&values).unwrap();
            let before = engine.elements(l).unwrap();
            let at = before[pos].0;
            let (x, y) = engine.cut(l, at).unwrap();
            prop_assert_eq!(
                engine.list_len(x).unwrap(),
                pos + 1,
                "{} cut point", kind.name()
            );
            let back = engine.link(x, y).unwrap();
            prop_assert_eq!(&engine.elements(back).unwrap(), &before);
            let report = engine.validate(back).unwrap();
            prop_assert!(report.ok(), "{}: {:?}", kind.name(), report.violations.first());
        }
    }

    /// Point updates keep engines aligned with the oracle.
    #[test]
    fn changeval_matches_oracle(values in list(), pos_seed in any::<u64>(), new in value()) {
        let pos = (pos_seed % values.len() as u64) as usize;
        let mut oracle = EngineKind::Oracle.build();
        let ol = oracle.new_list(&values).unwrap();
        let target = oracle.elements(ol).unwrap()[pos].0;
        oracle.changeval(ol, target, new).unwrap();
        let expected = oracle.psort(ol, values.len()).unwrap();

        for kind in engines() {
            let mut engine = kind.build();
            let l = engine.new_list(&values).unwrap();
            engine.changeval(l, target, new).unwrap();
            prop_assert_eq!(&engine.psort(l, values.len()).unwrap(), &expected);
            let report = engine.validate(l).unwrap();
            prop_assert!(report.ok(), "{}: {:?}", kind.name(), report.violations.first());
        }
    }

    /// link concatenates sequences and stays within one height of the
    /// taller input.
    #[test]
    fn link_concatenates(va in list(), vb in list()) {
        for kind in engines() {
            let mut engine = kind.build();
            let a = engine.new_list(&va).unwrap();
            let b = engine.new_list(&vb).unwrap();
            let ea = engine.elements(a).unwrap();
            let eb = engine.elements(b).unwrap();
            let l = engine.link(a, b).unwrap();
            let expected: Vec<_> = ea.into_iter().chain(eb).collect();
            prop_assert_eq!(&engine.elements(l).unwrap(), &expected);
            let report = engine.validate(l).unwrap();
            prop_assert!(report.ok(), "{}: {:?}", kind.name(), report.violations.first());
        }

        // Height growth, checked at the tree level.
        let mut arena = Arena::new();
        let mut next_id = 0u64;
        let mut items = |values: &[i64]| -> Vec<(ElementId, i64)> {
            values
                .iter()
                .map(|v| {
                    next_id += 1;
                    (ElementId(next_id), *v)
                })
                .collect()
        };
        let t1 = tree::build(&mut arena, &items(&va)).unwrap();
        let t2 = tree::build(&mut arena, &items(&vb)).unwrap();
        let (h1, h2) = (t1.height(&arena), t2.height(&arena));
        let mut m = dps_core::Metrics::new();
        let linked = dps_core::tt::link(&mut arena, t1, t2, &mut m);
        prop_assert!(linked.height(&arena) <= h1.max(h2) + 1);
        prop_assert!(m.rotations <= 2, "one rebalancing event");
    }

    /// A rotation is undone by its mirror, and both keep the min-of-children
    /// discipline at the touched nodes.
    #[test]
    fn rotations_invert(values in prop::collection::vec(value(), 4..64)) {
        let mut arena = Arena::new();
        let items: Vec<(ElementId, i64)> = values
            .iter()
            .enumerate()
            .map(|(i, v)| (ElementId(i as u64), *v))
            .collect();
        let t = tree::build(&mut arena, &items).unwrap();
        let root = t.root.unwrap();
        let right = arena.node(root).right.unwrap();
        prop_assume!(!arena.node(right).is_leaf());

        let order_before: Vec<ElementId> = tree::leaves(&arena, root)
            .iter()
            .map(|&l| arena.node(l).key.tiebreak)
            .collect();

        let new_top = tree::rotate_left(&mut arena, right).unwrap();
        let order_mid: Vec<ElementId> = tree::leaves(&arena, new_top)
            .iter()
            .map(|&l| arena.node(l).key.tiebreak)
            .collect();
        prop_assert_eq!(&order_mid, &order_before, "rotation must keep leaf order");

        let demoted = arena.node(new_top).left.unwrap();
        let back = tree::rotate_right(&mut arena, demoted).unwrap();
        prop_assert_eq!(back, root);
        let report = tree::validate(&arena, &t);
        prop_assert!(report.ok(), "{:?}", report.violations.first());
    }
}
