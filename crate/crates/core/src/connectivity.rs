//! Vertex cuts, separating triangles and essential 4-connectivity.
//!
//! Brute force over vertex subsets is the reference path; separating
//! triangles (triangles that are not faces) are the fast path for
//! triangulations. Both are kept and cross-checked.

use serde::Serialize;
use thiserror::Error;

use crate::embedding::{Embedding, Triangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectivityError {
    #[error("graph is not 3-connected")]
    NotThreeConnected,
    #[error("3-cut {cut:?} leaves {components} components in a 3-connected planar graph")]
    CutComponents { cut: [usize; 3], components: usize },
    #[error("trivial-cut test and degree-3 neighborhood test disagree on {cut:?}")]
    CharacterizationMismatch { cut: [usize; 3] },
}

/// A 3-vertex cut together with the components it leaves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutSet {
    pub vertices: [usize; 3],
    pub components: Vec<Vec<usize>>,
    pub trivial: bool,
}

impl CutSet {
    fn new(g: &Embedding, vertices: [usize; 3]) -> CutSet {
        let components = components_without(g, &vertices);
        let trivial = components.iter().filter(|c| c.len() >= 2).count() <= 1;
        CutSet { vertices, components, trivial }
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Components of `g - removed`, each sorted, ordered by smallest vertex.
pub fn components_without(g: &Embedding, removed: &[usize]) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut gone = vec![false; n];
    for &v in removed {
        gone[v] = true;
    }
    let mut ds = DisjointSets::new(n);
    for (u, v) in g.edges() {
        if !gone[u] && !gone[v] {
            ds.union(u, v);
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for v in 0..n {
        if gone[v] {
            continue;
        }
        let r = ds.find(v);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(v);
    }
    comps
}

fn for_each_subset(n: usize, size: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        for v in start..n {
            cur.push(v);
            let keep_going = rec(v + 1, n, size, cur, f);
            cur.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    rec(0, n, size, &mut Vec::with_capacity(size), &mut f)
}

/// True iff `n > k` and no set of fewer than `k` vertices disconnects `g`.
pub fn connectivity_at_least(g: &Embedding, k: usize) -> bool {
    if g.n() <= k {
        return false;
    }
    (0..k).all(|size| for_each_subset(g.n(), size, |s| components_without(g, s).len() == 1))
}

/// All 3-cuts of a 3-connected graph, by brute force over vertex triples.
pub fn three_cuts(g: &Embedding) -> Result<Vec<CutSet>, ConnectivityError> {
    if !connectivity_at_least(g, 3) {
        return Err(ConnectivityError::NotThreeConnected);
    }
    let mut cuts = Vec::new();
    let mut bad = None;
    for_each_subset(g.n(), 3, |s| {
        let cut = CutSet::new(g, [s[0], s[1], s[2]]);
        if cut.components.len() > 1 {
            if cut.components.len() != 2 {
                bad = Some(ConnectivityError::CutComponents { cut: cut.vertices, components: cut.components.len() });
                return false;
            }
            cuts.push(cut);
        }
        true
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(cuts),
    }
}

/// All triangles of `t` that are not faces, lexicographically ordered.
pub fn separating_triangles(t: &Triangulation) -> Vec<CutSet> {
    let mut out = Vec::new();
    for (u, v) in t.edges() {
        for w in t.sorted_neighbors(u) {
            if w > v && t.has_edge(v, w) && !t.is_triangle_face(u, v, w) {
                out.push(CutSet::new(t, [u, v, w]));
            }
        }
    }
    out
}

/// Essential 4-connectivity of a 3-connected planar graph. Evaluates both
/// "every 3-cut is trivial" and "every 3-cut is the neighborhood of a
/// degree-3 vertex" and reports an error if they disagree.
pub fn is_essentially_4_connected(g: &Embedding) -> Result<bool, ConnectivityError> {
    let cuts = three_cuts(g)?;
    let mut all_trivial = true;
    for cut in &cuts {
        let by_components = cut.trivial;
        let by_neighborhood = is_degree3_neighborhood(g, cut.vertices);
        if by_components != by_neighborhood {
            return Err(ConnectivityError::CharacterizationMismatch { cut: cut.vertices });
        }
        all_trivial &= by_components;
    }
    Ok(all_trivial)
}

/// Whether `s` is `N(v)` for some vertex `v` of degree 3.
pub fn is_degree3_neighborhood(g: &Embedding, s: [usize; 3]) -> bool {
    let mut key = s;
    key.sort_unstable();
    (0..g.n()).any(|v| g.degree(v) == 3 && g.sorted_neighbors(v) == key)
}

/// The first non-trivial separating triangle, if any.
pub fn nontrivial_cut(t: &Triangulation) -> Option<CutSet> {
    separating_triangles(t).into_iter().find(|c| !c.trivial)
}
