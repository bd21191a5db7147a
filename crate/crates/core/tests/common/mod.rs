//! Shared fixtures and an exhaustive subset-DP oracle for cycle questions.
#![allow(dead_code)]

use std::collections::VecDeque;
use std::path::PathBuf;

use tricirc::generators::{
    double_wheel, extremal_expand, random_4connected_triangulation, random_essentially_4connected_triangulation,
};
use tricirc::{Embedding, Triangulation};

/// Largest vertex count the oracle accepts; its tables have `2^n` entries.
pub const ORACLE_MAX_N: usize = 22;

fn adjacency(g: &Embedding) -> Vec<u32> {
    assert!(g.n() <= ORACLE_MAX_N, "oracle limited to {ORACLE_MAX_N} vertices");
    (0..g.n()).map(|v| g.rotation(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect()
}

/// `cyc[mask]` says whether `G[mask]` has a Hamiltonian cycle.
///
/// Held-Karp style: `ends[mask]` is the set of vertices `v` such that a path
/// starting at the lowest vertex of `mask` visits exactly `mask` and stops
/// at `v`. Extending only by vertices above the start keeps the start the
/// lowest bit, so one table serves every start.
pub fn cycle_masks(g: &Embedding) -> Vec<bool> {
    let n = g.n();
    let adj = adjacency(g);
    let full = 1usize << n;
    let mut ends = vec![0u32; full];
    for s in 0..n {
        ends[1 << s] = 1 << s;
    }
    let mut cyc = vec![false; full];
    for mask in 1..full {
        let e = ends[mask];
        if e == 0 {
            continue;
        }
        let s = mask.trailing_zeros() as usize;
        if mask.count_ones() >= 3 && e & adj[s] != 0 {
            cyc[mask] = true;
        }
        let above = !((1u32 << (s + 1)) - 1);
        let mut rest = e;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut next = adj[v] & !(mask as u32) & above;
            while next != 0 {
                let u = next.trailing_zeros();
                next &= next - 1;
                ends[mask | 1 << u] |= 1 << u;
            }
        }
    }
    cyc
}

/// Whether a cycle on vertex set `mask` would be good: everything outside
/// has degree 3 and no two outside vertices are adjacent.
pub fn good_complement(g: &Embedding, adj: &[u32], mask: usize) -> bool {
    let out = !(mask as u32) & ((1u32 << g.n()) - 1);
    let mut rest = out;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if g.degree(v) != 3 || adj[v] & out != 0 {
            return false;
        }
    }
    true
}

pub struct Oracle {
    pub circumference: usize,
    /// `None` when the graph has no good cycle.
    pub longest_good: Option<usize>,
    /// Vertex sets of the longest good cycles.
    pub longest_good_sets: Vec<usize>,
}

pub fn oracle(g: &Embedding) -> Oracle {
    let adj = adjacency(g);
    let cyc = cycle_masks(g);
    let mut circumference = 0;
    let mut best = 0;
    let mut sets = Vec::new();
    for (mask, &c) in cyc.iter().enumerate() {
        if !c {
            continue;
        }
        let size = mask.count_ones() as usize;
        circumference = circumference.max(size);
        if good_complement(g, &adj, mask) {
            if size > best {
                best = size;
                sets.clear();
            }
            if size == best {
                sets.push(mask);
            }
        }
    }
    Oracle { circumference, longest_good: (best > 0).then_some(best), longest_good_sets: sets }
}

pub fn mask_of(verts: &[usize]) -> usize {
    verts.iter().fold(0, |m, &v| m | 1 << v)
}

/// Whether `g` minus `removed` is disconnected, by breadth-first search.
pub fn disconnects(g: &Embedding, removed: &[usize]) -> bool {
    let n = g.n();
    let mut gone = vec![false; n];
    for &v in removed {
        gone[v] = true;
    }
    let Some(start) = (0..n).find(|&v| !gone[v]) else {
        return false;
    };
    let mut seen = gone.clone();
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &u in g.rotation(v) {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                queue.push_back(u);
            }
        }
    }
    count < n - removed.len()
}

pub fn k4() -> Triangulation {
    Triangulation::from_rotation(vec![vec![1, 2, 3], vec![0, 3, 2], vec![0, 1, 3], vec![0, 2, 1]]).unwrap()
}

pub fn octahedron() -> Triangulation {
    double_wheel(4).unwrap()
}

fn sorted_face(t: &Triangulation, f: usize) -> [usize; 3] {
    let v = &t.faces()[f];
    let mut a = [v[0], v[1], v[2]];
    a.sort_unstable();
    a
}

/// Stacks into `faces` one after another; each index refers to the face
/// list of the current triangulation.
pub fn stacked(base: Triangulation, faces: &[usize]) -> Triangulation {
    faces.iter().fold(base, |t, &f| {
        let face = sorted_face(&t, f % t.faces().len());
        t.stack(face).unwrap()
    })
}

/// The octahedron with two nested vertices inside one face: the face
/// triangle becomes a separating triangle with two vertices inside.
pub fn double_stacked() -> Triangulation {
    let t = octahedron().stack([0, 1, 4]).unwrap();
    let x = t.n() - 1;
    t.stack([0, 1, x]).unwrap()
}

/// Maximal planar graphs on at most 10 vertices covering every family the
/// crate handles, plus stacked graphs that are neither.
pub fn small_fixtures() -> Vec<(String, Triangulation)> {
    let mut out = vec![("k4".to_string(), k4()), ("octahedron".to_string(), octahedron())];
    for r in 5..=8 {
        out.push((format!("double_wheel({r})"), double_wheel(r).unwrap()));
    }
    for (name, faces) in [
        ("k4+1", vec![0]),
        ("k4+2", vec![0, 1]),
        ("k4+all", vec![0, 2, 4, 6]),
        ("apollonian7", vec![0, 3, 5]),
        ("apollonian9", vec![0, 1, 2, 3, 4]),
        ("apollonian10", vec![0, 5, 7, 9, 2, 11]),
    ] {
        out.push((name.to_string(), stacked(k4(), &faces)));
    }
    out.push(("octa+2".to_string(), stacked(octahedron(), &[0, 3])));
    out.push(("octa+4".to_string(), stacked(octahedron(), &[0, 2, 5, 7])));
    out.push(("double_stacked".to_string(), double_stacked()));
    for n in 7..=10 {
        for seed in 0..2 {
            out.push((format!("random4c n={n} s={seed}"), random_4connected_triangulation(n, seed).unwrap()));
        }
    }
    for n in 8..=10 {
        for seed in 0..3 {
            out.push((
                format!("randome4c n={n} s={seed}"),
                random_essentially_4connected_triangulation(n, seed).unwrap(),
            ));
        }
    }
    out
}

/// Essentially 4-connected instances, `count` seeds per vertex count.
pub fn e4c_corpus(ns: std::ops::RangeInclusive<usize>, count: u64) -> Vec<(usize, u64, Triangulation)> {
    ns.flat_map(|n| {
        (0..count).map(move |seed| (n, seed, random_essentially_4connected_triangulation(n, seed).unwrap()))
    })
    .collect()
}

/// The tight family for `n' = 6, 7, 8`.
pub fn extremal_family() -> Vec<(usize, Triangulation)> {
    (6..=8).map(|np| (np, extremal_expand(&double_wheel(np - 2).unwrap()).unwrap())).collect()
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}
