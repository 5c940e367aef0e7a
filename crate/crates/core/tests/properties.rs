mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use ttess_core::enumerate::{count_tessellations, DEFAULT_BUDGET};
use ttess_core::geometry::{build_event_table, choose_time_axis, extract_cells};
use ttess_core::gibbs::{energy, EnergyModel};
use ttess_core::reconstruct::{
    algorithm1, algorithm2_with, extract_scheme1, extract_scheme2, scheme2_for,
    select_initial_orphans, RebuildOptions,
};
use ttess_core::tessellation::{
    birth_tree, death_tree, marks_from_trees, murders, other_children, validate, Class, Mark, Node,
};
use ttess_core::ConvexPolygon;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn count_independent_of_axis(k in 0usize..6, seed in any::<u64>(), other in any::<u64>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let w2 = choose_time_axis(&case.lines, &ConvexPolygon::unit_square(), other ^ 0x5bd1)
            .unwrap();
        let t2 = build_event_table(&case.lines, &w2).unwrap();
        prop_assert_eq!(
            count_tessellations(&case.table, DEFAULT_BUDGET).unwrap(),
            count_tessellations(&t2, DEFAULT_BUDGET).unwrap()
        );
    }

    #[test]
    fn enumeration_matches_brute_force(k in 0usize..4, seed in any::<u64>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let fast: Vec<_> = common::all(&case.table).into_iter().map(|t| t.into_proto()).collect();
        prop_assert_eq!(fast, common::brute_force(&case.table));
    }

    #[test]
    fn enumerated_are_distinct_and_valid(k in 0usize..6, seed in any::<u64>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let all = common::all(&case.table);
        for t in &all {
            prop_assert_eq!(validate(t, &case.table).unwrap().class, Class::TTess);
        }
        let distinct: BTreeSet<_> = all.iter().collect();
        prop_assert_eq!(distinct.len(), all.len());
    }

    #[test]
    fn trees_and_counters(k in 1usize..6, seed in any::<u64>(), pick in any::<usize>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let all = common::all(&case.table);
        let t = &all[pick % all.len()];
        let (bt, dt) = (birth_tree(t, &case.table), death_tree(t, &case.table));
        prop_assert_eq!(&marks_from_trees(&bt, &dt, &case.table).unwrap(), t.proto());
        let m = murders(t, &case.table);
        prop_assert_eq!(m.total() + m.border_kills, k);
        let interior = bt.interior();
        let leaves = bt.leaves();
        prop_assert_eq!(interior.len() + leaves.len(), k);
        let u = select_initial_orphans(t, &case.table);
        prop_assert!(u.iter().all(|l| interior.contains(l)));
        let o = other_children(t.proto(), &case.table, &u);
        prop_assert_eq!(o.iter().map(|(_, n)| *n).sum::<usize>(), u.len());
        let s = scheme2_for(t, &case.table, &u).unwrap();
        let v: usize = s.virtual_murders.lines().iter().map(|c| c.finite().unwrap()).sum();
        prop_assert!(v <= k);
        for &l in &u {
            prop_assert!(bt.parent(l) == Node::Border || !u.contains(&bt.parent(l).line().unwrap()));
        }
    }

    #[test]
    fn scheme1_round_trip(k in 0usize..7, seed in any::<u64>(), pick in any::<usize>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let all = common::all(&case.table);
        let t = &all[pick % all.len()];
        prop_assert_eq!(&algorithm1(&case.table, &extract_scheme1(t, &case.table)).unwrap(), t);
    }

    #[test]
    fn scheme2_round_trip_with_trace(k in 0usize..7, seed in any::<u64>(), pick in any::<usize>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let all = common::all(&case.table);
        let t = &all[pick % all.len()];
        let cert = extract_scheme2(t, &case.table).unwrap();
        let options = RebuildOptions { record_trace: true, ..RebuildOptions::default() };
        let run = algorithm2_with(&case.table, &cert.scheme, options).unwrap();
        prop_assert_eq!(run.result.births(), t.births());
        prop_assert_eq!(run.result.deaths(), t.deaths());
        prop_assert_eq!(run.border_overflows, 0);
        if let Err(why) = common::check_trace(t, &case.table, &cert.scheme.orphans, &run) {
            return Err(TestCaseError::fail(why));
        }
        prop_assert!(cert.flagged || cert.meets_orphan_bound());
        prop_assert!(cert.count.parent_exponent_ok || cert.flagged);
    }

    #[test]
    fn arbitrary_orphan_sets_rebuild(k in 2usize..7, seed in any::<u64>(), pick in any::<usize>(), mask in any::<u32>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let all = common::all(&case.table);
        let t = &all[pick % all.len()];
        let interior = birth_tree(t, &case.table).interior();
        let u: BTreeSet<usize> =
            interior.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &l)| l).collect();
        let Ok(s) = scheme2_for(t, &case.table, &u) else { return Ok(()) };
        let options = RebuildOptions { record_trace: true, ..RebuildOptions::default() };
        let run = algorithm2_with(&case.table, &s, options).unwrap();
        if let Err(why) = common::check_trace(t, &case.table, &u, &run) {
            return Err(TestCaseError::fail(why));
        }
    }

    #[test]
    fn single_mark_mutation_rejected(k in 1usize..6, seed in any::<u64>(), pick in any::<usize>(), slot in any::<usize>(), to in any::<usize>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let all = common::all(&case.table);
        let t = &all[pick % all.len()];
        let line = slot % k;
        let on = case.table.per_line(line);
        let mut proto = t.proto().clone();
        let current = if slot / k % 2 == 0 { proto.births()[line] } else { proto.deaths()[line] };
        let choices: Vec<usize> = on.iter().copied().filter(|&e| Mark::Event(e) != current).collect();
        let e = Mark::Event(choices[to % choices.len()]);
        if slot / k % 2 == 0 { proto.set_birth(line, e) } else { proto.set_death(line, e) }
        let report = validate(&proto, &case.table).unwrap();
        prop_assert!(report.class != Class::TTess);
        prop_assert!(!report.violations.is_empty());
    }

    #[test]
    fn cells_partition_window(k in 0usize..6, seed in any::<u64>(), pick in any::<usize>()) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let all = common::all(&case.table);
        let t = &all[pick % all.len()];
        let cells = extract_cells(t, &case.lines, &case.window).unwrap();
        prop_assert_eq!(cells.len(), t.segment_count() + 1);
        let total: f64 = cells.iter().map(|c| c.area).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        for c in &cells {
            let hull: f64 = c.polygon.iter().zip(c.polygon.iter().cycle().skip(1))
                .map(|(a, b)| a.cross(*b)).sum::<f64>() / 2.0;
            prop_assert!((hull - c.area).abs() < 1e-9, "hull {} vs faces {}", hull, c.area);
        }
    }

    #[test]
    fn stability_bound_holds(k in 0usize..6, seed in any::<u64>(), th in -2.0f64..2.0) {
        let Some(case) = common::case(k, seed) else { return Ok(()) };
        let model = EnergyModel::Composite(vec![
            EnergyModel::NLines(th),
            EnergyModel::TotalLength(-th.abs()),
            EnergyModel::AreaVariance(-th.abs()),
        ]);
        let c = model.stability_constant(&ConvexPolygon::unit_square());
        for t in common::all(&case.table) {
            let h = energy(&model, &t, &case.lines, &case.window).unwrap();
            prop_assert!(h + c * k as f64 >= -1e-9);
        }
    }
}
