mod common;

use common::{disconnects, double_stacked, extremal_family, octahedron, small_fixtures};
use proptest::prelude::*;
use tricirc::connectivity::{is_essentially_4_connected, nontrivial_cut, separating_triangles, three_cuts};
use tricirc::embedding::delete_independent_deg3;
use tricirc::generators::{
    double_wheel, extremal_expand, random_4connected_triangulation, random_essentially_4connected_triangulation,
};
use tricirc::{Embedding, Triangulation};

/// Every 3-set whose removal disconnects the graph, by brute force.
fn brute_three_cuts(g: &Embedding) -> Vec<[usize; 3]> {
    let n = g.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if disconnects(g, &[a, b, c]) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn sorted(mut v: Vec<[usize; 3]>) -> Vec<[usize; 3]> {
    v.sort_unstable();
    v
}

#[test]
fn three_cuts_are_the_separating_triangles() {
    for (name, g) in small_fixtures().into_iter().filter(|(_, g)| g.n() >= 5) {
        let brute = brute_three_cuts(&g);
        let cuts: Vec<[usize; 3]> = three_cuts(&g).unwrap().iter().map(|c| c.vertices).collect();
        let tris: Vec<[usize; 3]> = separating_triangles(&g).iter().map(|c| c.vertices).collect();
        assert_eq!(sorted(cuts), brute, "{name}");
        assert_eq!(sorted(tris), brute, "{name}");
    }
}

#[test]
fn double_stacked_is_not_essentially_4_connected() {
    let g = double_stacked();
    assert!(!g.is_essentially_4_connected());
    let cut = nontrivial_cut(&g).expect("a witness cut");
    assert!(disconnects(&g, &cut.vertices));
    assert!(!cut.trivial);
}

#[test]
fn octahedron_is_4_connected() {
    let g = octahedron();
    assert!(g.is_4_connected());
    assert!(separating_triangles(&g).is_empty());
    assert_eq!(is_essentially_4_connected(&g), Ok(true));
}

#[test]
fn extremal_family_has_one_separating_triangle_per_base_face() {
    for (np, g) in extremal_family() {
        assert_eq!(g.n(), 3 * np - 4);
        assert!(g.is_essentially_4_connected());
        assert!(!g.is_4_connected());
        assert_eq!(separating_triangles(&g).len(), 2 * np - 4);
    }
}

#[test]
fn rot_text_round_trips() {
    for (name, g) in small_fixtures() {
        let text = g.to_rot_string();
        let back = Triangulation::parse_rot(&text).unwrap();
        assert_eq!(back, g, "{name}");
        assert_eq!(back.to_rot_string(), text, "{name}");
    }
}

#[test]
fn face_count_follows_euler() {
    for (name, g) in small_fixtures() {
        assert_eq!(g.faces().len(), 2 * g.n() - 4, "{name}");
        assert_eq!(g.m(), 3 * g.n() - 6, "{name}");
    }
}

/// Deletes the degree-3 vertices picked by `pick` and stacks them back.
fn delete_and_restack(t: &Triangulation, pick: impl Fn(usize) -> bool) -> (usize, Triangulation) {
    let mut set: Vec<usize> = Vec::new();
    for v in 0..t.n() {
        if t.degree(v) == 3 && pick(v) && !t.rotation(v).iter().any(|u| set.contains(u)) {
            set.push(v);
        }
    }
    let del = delete_independent_deg3(t, &set).unwrap();
    assert_eq!(del.nonempty_faces().len(), set.len());
    let mut back = del.result.clone();
    for f in del.nonempty_faces() {
        let face = &del.result.faces()[f];
        back = back.stack([face[0], face[1], face[2]]).unwrap();
    }
    (set.len(), back)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_4connected_has_the_requested_shape(n in 6usize..=40, seed in any::<u64>()) {
        let g = random_4connected_triangulation(n, seed).unwrap();
        prop_assert_eq!(g.n(), n);
        prop_assert!(g.is_maximal_planar());
        prop_assert!(g.is_4_connected());
        prop_assert_eq!(random_4connected_triangulation(n, seed).unwrap(), g);
    }

    #[test]
    fn random_essentially_4connected_has_the_requested_shape(n in 8usize..=40, seed in any::<u64>()) {
        let g = random_essentially_4connected_triangulation(n, seed).unwrap();
        prop_assert_eq!(g.n(), n);
        prop_assert!(g.is_essentially_4_connected());
        prop_assert!(nontrivial_cut(&g).is_none());
        prop_assert_eq!(random_essentially_4connected_triangulation(n, seed).unwrap().to_rot_string(), g.to_rot_string());
    }

    #[test]
    fn extremal_expansion_of_a_random_base(np in 6usize..=14, seed in any::<u64>()) {
        let base = random_4connected_triangulation(np, seed).unwrap();
        let g = extremal_expand(&base).unwrap();
        prop_assert_eq!(g.n(), 3 * np - 4);
        prop_assert!(g.is_essentially_4_connected());
        prop_assert_eq!((np..g.n()).filter(|&v| g.degree(v) == 3).count(), 2 * np - 4);
    }

    #[test]
    fn deleting_and_restacking_gives_back_the_graph(n in 8usize..=30, seed in any::<u64>(), bits in any::<u64>()) {
        let g = random_essentially_4connected_triangulation(n, seed).unwrap();
        let (deleted, back) = delete_and_restack(&g, |v| bits >> (v % 64) & 1 == 1);
        prop_assert_eq!(back.n(), n);
        prop_assert!(back.is_isomorphic(&g), "{} deleted", deleted);
    }

    #[test]
    fn double_wheels_are_4_connected(r in 4usize..=40) {
        let g = double_wheel(r).unwrap();
        prop_assert_eq!(g.n(), r + 2);
        prop_assert!(g.is_4_connected());
        prop_assert_eq!(g.degree(r), r);
    }
}
