mod common;

use common::{e4c_corpus, mask_of, oracle, small_fixtures};
use proptest::prelude::*;
use tricirc::cycles::{
    all_longest_good_cycles, check_cycle, circumference, extend, extend_fully, extendable_edges, is_good_cycle,
    longest_good_cycle, Budget, CycleError, GoodCycle,
};
use tricirc::generators::random_essentially_4connected_triangulation;

#[test]
fn circumference_matches_subset_dp_on_small_fixtures() {
    let fixtures = small_fixtures();
    assert!(fixtures.len() >= 20);
    for (name, g) in &fixtures {
        let (len, cycle) = circumference(g, &Budget::unlimited()).unwrap();
        check_cycle(g, &cycle).unwrap();
        assert_eq!(cycle.len(), len, "{name}");
        assert_eq!(len, oracle(g).circumference, "{name}");
    }
}

#[test]
fn longest_good_cycle_matches_subset_dp_on_small_fixtures() {
    for (name, g) in &small_fixtures() {
        let expected = oracle(g);
        match longest_good_cycle(g, &Budget::unlimited()) {
            Ok(c) => {
                assert!(is_good_cycle(g, c.verts()).unwrap(), "{name}");
                assert_eq!(Some(c.len()), expected.longest_good, "{name}");
            }
            Err(CycleError::NoGoodCycle) => assert_eq!(expected.longest_good, None, "{name}"),
            Err(e) => panic!("{name}: {e}"),
        }
    }
}

#[test]
fn all_longest_good_cycles_cover_every_oracle_vertex_set() {
    for (n, seed, g) in e4c_corpus(11..=13, 3) {
        let expected = oracle(&g);
        let found = all_longest_good_cycles(&g, &Budget::unlimited()).unwrap();
        let mut sets: Vec<usize> = found.iter().map(|c| mask_of(c.verts())).collect();
        sets.sort_unstable();
        sets.dedup();
        let mut want = expected.longest_good_sets.clone();
        want.sort_unstable();
        assert_eq!(sets, want, "n={n} seed={seed}");
        for c in &found {
            assert_eq!(Some(c.len()), expected.longest_good);
        }
    }
}

#[test]
fn a_tight_deadline_times_out() {
    let g = random_essentially_4connected_triangulation(60, 1).unwrap();
    let budget = Budget::seconds(0.0);
    assert_eq!(circumference(&g, &budget), Err(CycleError::Timeout));
}

#[test]
fn too_many_vertices_is_rejected() {
    let g = random_essentially_4connected_triangulation(130, 0).unwrap();
    assert!(matches!(circumference(&g, &Budget::unlimited()), Err(CycleError::TooLarge { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn search_agrees_with_oracle_on_random_instances(n in 8usize..=14, seed in 0u64..1000) {
        let g = random_essentially_4connected_triangulation(n, seed).unwrap();
        let expected = oracle(&g);
        prop_assert_eq!(circumference(&g, &Budget::unlimited()).unwrap().0, expected.circumference);
        let c = longest_good_cycle(&g, &Budget::unlimited()).unwrap();
        prop_assert_eq!(Some(c.len()), expected.longest_good);
        prop_assert!(extendable_edges(&g, &c).is_empty());
    }

    #[test]
    fn extension_regrows_a_shrunk_longest_good_cycle(n in 11usize..=20, seed in 0u64..1000) {
        let g = random_essentially_4connected_triangulation(n, seed).unwrap();
        let Ok(best) = longest_good_cycle(&g, &Budget::unlimited()) else { return Ok(()) };
        prop_assert!(extendable_edges(&g, &best).is_empty());
        // Dropping degree-3 vertices keeps a cycle, since their neighbors
        // span a triangle; extension must then be able to grow it back.
        let shrunk: Vec<usize> = best.verts().iter().copied().filter(|&v| g.degree(v) != 3).collect();
        prop_assume!(shrunk.len() >= 3 && shrunk.len() < best.len());
        let Ok(c) = GoodCycle::new(&g, shrunk) else { return Ok(()) };
        let edges = extendable_edges(&g, &c);
        prop_assert!(!edges.is_empty());
        for ((x, y), z) in edges {
            let d = extend(&g, &c, (x, y)).unwrap();
            prop_assert_eq!(d.len(), c.len() + 1);
            prop_assert!(d.contains_edge(x, z) && d.contains_edge(z, y));
            prop_assert!(is_good_cycle(&g, d.verts()).unwrap());
        }
        let full = extend_fully(&g, &c);
        prop_assert!(full.len() > c.len() && full.len() <= best.len());
        prop_assert!(extendable_edges(&g, &full).is_empty());
        // a vertex of degree above 3 can never sit outside a good cycle
        prop_assert!((0..n).filter(|&v| g.degree(v) > 3).all(|v| full.verts().contains(&v)));
    }
}
