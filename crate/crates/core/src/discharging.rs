//! Instance-level verifier for the discharging proof of
//! `circ(G) >= 2/3 (n + 4)`.
//!
//! Given a longest good cycle `C` of `G`, the graph `H = G[V(C)]` is the
//! triangulation left after deleting the vertices off `C`. Its chords split
//! into two sides, each a maximal outerplanar graph whose weak dual is a
//! tree. Faces are classified by how many cycle edges they carry, weights
//! are pushed from cycle edges to faces and then between faces, and every
//! intermediate claim of the counting argument is checked on the instance.
//!
//! Weights are integers in sixths, so every conservation check is exact.
//! Faces are referred to by index into `H`'s face list internally and by
//! their sorted `G` vertex triple in reports.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::connectivity::{separating_triangles, three_cuts};
use crate::cycles::{
    self, circumference, extendable_edges, good_cycles_of_length, longest_good_cycle, Budget, CycleError, GoodCycle,
    RerouteKind, RerouteMove,
};
use crate::embedding::{delete_independent_deg3, Deletion, EmbeddingError, Triangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DischargeError {
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("edge {0:?} contradicts the side assignment of faces")]
    ChordConflict([usize; 2]),
    #[error("face {0:?} has all three edges on the cycle")]
    ThreeFaceFound([usize; 3]),
    #[error("face {0:?} carries a cycle edge but is not empty")]
    CycleFaceNotEmpty([usize; 3]),
    #[error("side {side} has no 0-face, so branches are undefined")]
    NoZeroFace { side: usize },
    #[error("rim of the branch at {face:?} is not a path of length {r}")]
    RimNotPath { face: [usize; 3], r: usize },
    #[error("weak dual of side {side}: {why}")]
    WeakDual { side: usize, why: String },
    #[error("{rule:?} and another rule both move weight from {src:?} to {dst:?}")]
    RuleAmbiguity { rule: Rule, src: [usize; 3], dst: [usize; 3] },
    #[error("{total} points exceed f1 + 2 f0 = {cover}")]
    PointCoverViolation { total: u32, cover: usize },
    #[error("{class}-face {face:?} holds {points} points")]
    PointCap { face: [usize; 3], class: usize, points: u32 },
    #[error("f1 + 2 f0 = {value} < 4")]
    PointSupplyTooSmall { value: usize },
}

type Result<T> = std::result::Result<T, DischargeError>;

/// `H` with its two sides, face classes and weak duals.
#[derive(Clone, Debug)]
pub struct SidePartition {
    pub deletion: Deletion,
    /// The cycle in `G` ids.
    pub cycle: GoodCycle,
    /// The cycle in `H` ids; cycle edge `e` joins positions `e` and `e + 1`.
    pub h_cycle: Vec<usize>,
    /// Cycle position of each `H` vertex.
    pub pos: Vec<usize>,
    /// Side (0 or 1) of each face of `H`. Side 0 holds the face left of
    /// the first cycle edge.
    pub side: Vec<usize>,
    /// Number of cycle edges on each face.
    pub class: Vec<usize>,
    pub empty: Vec<bool>,
    /// Cycle edge indices on each face.
    pub face_edges: Vec<Vec<usize>>,
    /// Per cycle edge, its face on side 0 and on side 1.
    pub edge_faces: Vec<[usize; 2]>,
    /// Faces across chords: the weak duals of both sides at once.
    pub dual: Vec<Vec<usize>>,
    /// Side of each chord, keyed by sorted `H` endpoints.
    pub chord_side: HashMap<(usize, usize), usize>,
}

impl SidePartition {
    pub fn h(&self) -> &Triangulation {
        &self.deletion.result
    }

    pub fn k(&self) -> usize {
        self.h_cycle.len()
    }

    /// Sorted `G` vertex triple of an `H` face.
    pub fn label(&self, f: usize) -> [usize; 3] {
        let v = &self.h().faces()[f];
        let mut t = [v[0], v[1], v[2]].map(|x| self.deletion.new_to_old[x]);
        t.sort_unstable();
        t
    }

    pub fn faces_on(&self, side: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.side.len()).filter(move |&f| self.side[f] == side)
    }

    /// Whether `uv` (cycle positions) is a chord on side `s`.
    pub fn is_chord_on(&self, s: usize, pu: usize, pv: usize) -> bool {
        let (u, v) = (self.h_cycle[pu], self.h_cycle[pv]);
        self.chord_side.get(&(u.min(v), u.max(v))) == Some(&s)
    }

    /// Classes of the two faces on cycle edge `e`, smaller first.
    pub fn edge_class(&self, e: usize) -> (usize, usize) {
        let [a, b] = self.edge_faces[e].map(|f| self.class[f]);
        (a.min(b), a.max(b))
    }

    /// Empty faces of class `j` on side `s`.
    pub fn f(&self, s: usize, j: usize) -> usize {
        self.faces_on(s).filter(|&f| self.class[f] == j && self.empty[f]).count()
    }

    pub fn zero_faces(&self, s: usize) -> usize {
        self.faces_on(s).filter(|&f| self.class[f] == 0).count()
    }

    fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        cycle_edge_index(&self.pos, a, b)
    }
}

fn cycle_edge_index(pos: &[usize], a: usize, b: usize) -> Option<usize> {
    let k = pos.len();
    let (pa, pb) = (pos[a], pos[b]);
    if (pa + 1) % k == pb {
        Some(pa)
    } else if (pb + 1) % k == pa {
        Some(pb)
    } else {
        None
    }
}

/// Builds `H`, splits its faces into the two sides of `C` and checks the
/// split against the chord interleaving structure.
pub fn build_side_partition(g: &Triangulation, c: &GoodCycle) -> Result<SidePartition> {
    let deletion = delete_independent_deg3(g, c.outside())?;
    let h = &deletion.result;
    let k = c.len();
    let h_cycle: Vec<usize> = c.verts().iter().map(|&v| deletion.old_to_new[v].unwrap()).collect();
    let mut pos = vec![0; k];
    for (i, &v) in h_cycle.iter().enumerate() {
        pos[v] = i;
    }
    let old = |v: usize| deletion.new_to_old[v];
    let nf = h.faces().len();

    let mut face_edges = Vec::with_capacity(nf);
    for face in h.faces() {
        let es: Vec<usize> = (0..3).filter_map(|i| cycle_edge_index(&pos, face[i], face[(i + 1) % 3])).collect();
        if es.len() == 3 {
            let mut t = [old(face[0]), old(face[1]), old(face[2])];
            t.sort_unstable();
            return Err(DischargeError::ThreeFaceFound(t));
        }
        face_edges.push(es);
    }
    let class: Vec<usize> = face_edges.iter().map(Vec::len).collect();

    // flood faces: crossing a chord keeps the side, crossing C switches it
    let mut side = vec![usize::MAX; nf];
    let start = h.face_of_dart(h_cycle[0], h_cycle[1]).expect("dart has a face");
    side[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        let face = &h.faces()[f];
        for i in 0..3 {
            let (a, b) = (face[i], face[(i + 1) % 3]);
            let across = h.face_of_dart(b, a).expect("dart has a face");
            let want = if cycle_edge_index(&pos, a, b).is_some() { 1 - side[f] } else { side[f] };
            if side[across] == usize::MAX {
                side[across] = want;
                queue.push_back(across);
            } else if side[across] != want {
                return Err(DischargeError::ChordConflict([old(a), old(b)]));
            }
        }
    }

    let mut edge_faces = Vec::with_capacity(k);
    for e in 0..k {
        let (a, b) = (h_cycle[e], h_cycle[(e + 1) % k]);
        let f1 = h.face_of_dart(a, b).unwrap();
        let f2 = h.face_of_dart(b, a).unwrap();
        let mut slot = [0; 2];
        slot[side[f1]] = f1;
        slot[side[f2]] = f2;
        edge_faces.push(slot);
    }

    let mut chord_side = HashMap::new();
    for (u, v) in h.edges() {
        if cycle_edge_index(&pos, u, v).is_none() {
            chord_side.insert((u, v), side[h.face_of_dart(u, v).unwrap()]);
        }
    }
    check_interleaving(&pos, &chord_side, &old)?;

    let dual = (0..nf)
        .map(|f| {
            let face = &h.faces()[f];
            (0..3)
                .filter(|&i| cycle_edge_index(&pos, face[i], face[(i + 1) % 3]).is_none())
                .map(|i| h.face_of_dart(face[(i + 1) % 3], face[i]).unwrap())
                .collect()
        })
        .collect();
    let empty = (0..nf).map(|f| deletion.is_empty_face(f)).collect();

    Ok(SidePartition {
        deletion: deletion.clone(),
        cycle: c.clone(),
        h_cycle,
        pos,
        side,
        class,
        empty,
        face_edges,
        edge_faces,
        dual,
        chord_side,
    })
}

/// Two chords whose endpoints alternate along the cycle cannot share a
/// side. Two-colors the interleaving graph and requires each component to
/// match the face-derived sides up to a swap.
fn check_interleaving(
    pos: &[usize],
    chord_side: &HashMap<(usize, usize), usize>,
    old: &dyn Fn(usize) -> usize,
) -> Result<()> {
    let mut chords: Vec<(usize, usize)> = chord_side.keys().copied().collect();
    chords.sort_unstable();
    let span = |&(u, v): &(usize, usize)| (pos[u].min(pos[v]), pos[u].max(pos[v]));
    let cross = |a: &(usize, usize), b: &(usize, usize)| {
        let ((p, q), (r, s)) = (span(a), span(b));
        (p < r && r < q && q < s) || (r < p && p < s && s < q)
    };
    let m = chords.len();
    let adj: Vec<Vec<usize>> =
        (0..m).map(|i| (0..m).filter(|&j| j != i && cross(&chords[i], &chords[j])).collect()).collect();
    let conflict = |c: (usize, usize)| DischargeError::ChordConflict([old(c.0), old(c.1)]);
    let mut color = vec![usize::MAX; m];
    for root in 0..m {
        if color[root] != usize::MAX {
            continue;
        }
        color[root] = 0;
        let mut comp = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if color[j] == usize::MAX {
                    color[j] = 1 - color[i];
                    comp.push(j);
                    queue.push_back(j);
                } else if color[j] == color[i] {
                    return Err(conflict(chords[j]));
                }
            }
        }
        let flip = chord_side[&chords[root]];
        if let Some(&bad) = comp.iter().find(|&&i| color[i] ^ flip != chord_side[&chords[i]]) {
            return Err(conflict(chords[bad]));
        }
    }
    Ok(())
}

/// Weak dual of a maximal outerplanar graph on cycle positions `0..k`,
/// built from its chords alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakDual {
    /// Triangles as sorted position triples, lexicographic.
    pub triangles: Vec<[usize; 3]>,
    pub adj: Vec<Vec<usize>>,
}

impl WeakDual {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_tree(&self) -> bool {
        let n = self.triangles.len();
        if n == 0 || self.edge_count() != n - 1 {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if !std::mem::replace(&mut seen[y], true) {
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.adj.len()).filter(|&x| self.adj[x].len() == 1).collect()
    }
}

pub fn weak_dual(k: usize, chords: &[(usize, usize)]) -> WeakDual {
    let mut nb = vec![HashSet::new(); k];
    let mut add = |a: usize, b: usize| {
        nb[a].insert(b);
        nb[b].insert(a);
    };
    for i in 0..k {
        add(i, (i + 1) % k);
    }
    for &(a, b) in chords {
        add(a, b);
    }
    let is_cycle_edge = |a: usize, b: usize| (a + 1) % k == b || (b + 1) % k == a;
    let mut triangles = Vec::new();
    for a in 0..k {
        for &b in &nb[a] {
            for &c in &nb[b] {
                if a < b && b < c && nb[a].contains(&c) {
                    triangles.push([a, b, c]);
                }
            }
        }
    }
    triangles.sort_unstable();
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (t, &[a, b, c]) in triangles.iter().enumerate() {
        for (x, y) in [(a, b), (a, c), (b, c)] {
            if !is_cycle_edge(x, y) {
                by_pair.entry((x, y)).or_default().push(t);
            }
        }
    }
    let mut adj = vec![Vec::new(); triangles.len()];
    for ts in by_pair.values() {
        for &s in ts {
            for &t in ts {
                if s != t {
                    adj[s].push(t);
                }
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    WeakDual { triangles, adj }
}

/// Checks both weak duals: trees on `k - 2` nodes of maximum degree 3,
/// matching the faces of each side, with face class `3 - degree`.
pub fn check_weak_duals(sp: &SidePartition) -> Result<[WeakDual; 2]> {
    let k = sp.k();
    let mut out = Vec::new();
    for s in 0..2 {
        let err = |why: String| DischargeError::WeakDual { side: s + 1, why };
        let chords: Vec<(usize, usize)> =
            sp.chord_side.iter().filter(|&(_, &side)| side == s).map(|(&(u, v), _)| (sp.pos[u], sp.pos[v])).collect();
        let wd = weak_dual(k, &chords);
        if wd.triangles.len() != k - 2 {
            return Err(err(format!("{} triangles, expected {}", wd.triangles.len(), k - 2)));
        }
        if !wd.is_tree() {
            return Err(err("not a tree".into()));
        }
        if wd.max_degree() > 3 {
            return Err(err(format!("max degree {}", wd.max_degree())));
        }
        let mut faces: Vec<[usize; 3]> = sp
            .faces_on(s)
            .map(|f| {
                let v = &sp.h().faces()[f];
                let mut t = [sp.pos[v[0]], sp.pos[v[1]], sp.pos[v[2]]];
                t.sort_unstable();
                t
            })
            .collect();
        faces.sort_unstable();
        if faces != wd.triangles {
            return Err(err("triangles differ from the faces on this side".into()));
        }
        for f in sp.faces_on(s) {
            if sp.class[f] + sp.dual[f].len() != 3 {
                return Err(err(format!(
                    "face {:?} has class {} but dual degree {}",
                    sp.label(f),
                    sp.class[f],
                    sp.dual[f].len()
                )));
            }
        }
        out.push(wd);
    }
    Ok([out[0].clone(), out[1].clone()])
}

/// Checks that every face carrying a cycle edge is empty.
pub fn check_cycle_faces_empty(sp: &SidePartition) -> Result<()> {
    match (0..sp.class.len()).find(|&f| sp.class[f] > 0 && !sp.empty[f]) {
        Some(f) => Err(DischargeError::CycleFaceNotEmpty(sp.label(f))),
        None => Ok(()),
    }
}

/// Path in a weak dual from a 2-face through 1-faces to the first 0-face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub side: usize,
    /// `faces[0]` is the 2-face, `faces[r - 1]` the 0-face.
    pub faces: Vec<usize>,
    /// Cycle positions of the rim in cycle order, `r + 1` of them.
    pub rim: Vec<usize>,
}

impl Branch {
    pub fn r(&self) -> usize {
        self.faces.len()
    }

    pub fn owner(&self) -> usize {
        self.faces[0]
    }

    pub fn end(&self) -> usize {
        self.faces[self.faces.len() - 1]
    }
}

/// One branch per 2-face of side `s`, with the rim checked to be a path of
/// length `r`.
pub fn branches(sp: &SidePartition, s: usize) -> Result<Vec<Branch>> {
    if sp.zero_faces(s) == 0 {
        return Err(DischargeError::NoZeroFace { side: s + 1 });
    }
    let k = sp.k();
    let mut out = Vec::new();
    for f in sp.faces_on(s).filter(|&f| sp.class[f] == 2) {
        let mut faces = vec![f];
        let (mut prev, mut cur) = (usize::MAX, f);
        loop {
            if cur != f {
                match sp.dual[cur].len() {
                    3 => break,
                    1 => return Err(DischargeError::NoZeroFace { side: s + 1 }),
                    _ => {}
                }
            }
            let next = *sp.dual[cur].iter().find(|&&x| x != prev).expect("leaf has a neighbor");
            prev = cur;
            cur = next;
            faces.push(cur);
        }
        let r = faces.len();
        let edges: HashSet<usize> = faces.iter().flat_map(|&x| sp.face_edges[x].iter().copied()).collect();
        let not_path = DischargeError::RimNotPath { face: sp.label(f), r };
        if edges.len() != r {
            return Err(not_path);
        }
        let first = *edges.iter().find(|&&e| !edges.contains(&((e + k - 1) % k))).ok_or(not_path.clone())?;
        if !(0..r).all(|i| edges.contains(&((first + i) % k))) {
            return Err(not_path);
        }
        let rim = (0..=r).map(|i| (first + i) % k).collect();
        out.push(Branch { side: s, faces, rim });
    }
    Ok(out)
}

/// Rules moving weight (R) or points (P).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    P1,
    P2,
    P3,
    P4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// A cycle edge by index.
    Edge(usize),
    Face(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub rule: Rule,
    pub src: Source,
    pub dst: usize,
    /// The face through which a rule reaches its target (`alpha` or `beta`).
    pub via: Option<usize>,
    pub amount_sixths: i64,
}

#[derive(Clone, Debug, Default)]
pub struct WeightLedger {
    /// Per cycle edge.
    pub w0: Vec<i64>,
    /// Per face of `H`, after the edge rules.
    pub w1: Vec<i64>,
    /// Per face of `H`, after the face rules.
    pub w2: Vec<i64>,
    pub transfers: Vec<Transfer>,
    /// Per face of `H`.
    pub points: Vec<u32>,
    pub awards: Vec<(Rule, usize, usize)>,
}

/// Sixths a cycle edge of class `(a, b)` sends to its `a` and `b` faces.
fn edge_split(a: usize, b: usize) -> Option<(Rule, i64, i64)> {
    match (a, b) {
        (1, 1) => Some((Rule::R1, 3, 3)),
        (1, 2) => Some((Rule::R2, 4, 2)),
        (2, 1) => Some((Rule::R2, 2, 4)),
        (2, 2) => Some((Rule::R3, 3, 3)),
        _ => None,
    }
}

/// Rules R1 to R3: each cycle edge splits its unit weight between its two
/// faces.
pub fn redistribute_first(sp: &SidePartition) -> WeightLedger {
    let k = sp.k();
    let mut ledger = WeightLedger { w0: vec![6; k], w1: vec![0; sp.class.len()], ..Default::default() };
    for e in 0..k {
        let [f, g] = sp.edge_faces[e];
        let (rule, a, b) = edge_split(sp.class[f], sp.class[g]).expect("faces on a cycle edge have class 1 or 2");
        for (dst, amount) in [(f, a), (g, b)] {
            ledger.w1[dst] += amount;
            ledger.transfers.push(Transfer { rule, src: Source::Edge(e), dst, via: None, amount_sixths: amount });
        }
    }
    ledger
}

/// The value of `w1` an empty face must have given the classes of its
/// cycle edges.
pub fn expected_w1(sp: &SidePartition, f: usize) -> i64 {
    let other = |e: usize| {
        let [a, b] = sp.edge_faces[e];
        sp.class[if a == f { b } else { a }]
    };
    let mut ks: Vec<usize> = sp.face_edges[f].iter().map(|&e| other(e)).collect();
    ks.sort_unstable();
    match (sp.class[f], ks.as_slice()) {
        (2, [2, 2]) => 6,
        (2, [1, 2]) => 5,
        (2, [1, 1]) => 4,
        (1, [2]) => 4,
        (1, [1]) => 3,
        _ => 0,
    }
}

/// Rules R4 to R8, applied simultaneously from the `w1` state to every
/// 2-face holding more than 2/3.
pub fn redistribute_second(
    sp: &SidePartition,
    mut ledger: WeightLedger,
    branches: &[Vec<Branch>; 2],
) -> Result<WeightLedger> {
    let branch_of: HashMap<usize, &Branch> = branches.iter().flatten().map(|b| (b.owner(), b)).collect();
    let is_12 = |e: usize| sp.edge_class(e) == (1, 2);
    let mut out = Vec::new();
    for phi in 0..sp.class.len() {
        if sp.class[phi] != 2 || !sp.empty[phi] || ledger.w1[phi] <= 4 {
            continue;
        }
        let b = branch_of[&phi];
        let (r, end) = (b.r(), b.end());
        let mut send = |rule, dst, via, amount| {
            out.push(Transfer { rule, src: Source::Face(phi), dst, via, amount_sixths: amount })
        };
        if sp.empty[end] && r <= 3 {
            send(Rule::R4, end, None, ledger.w1[phi] - 4);
        }
        for &fj in &b.faces[1..r - 1] {
            if sp.class[fj] == 1 && sp.edge_class(sp.face_edges[fj][0]) == (1, 1) {
                send(Rule::R5, fj, None, 1);
            }
        }
        if sp.empty[end] && r >= 4 {
            send(Rule::R6, end, None, 1);
        }
        let other = 1 - sp.side[phi];
        for &e in &sp.face_edges[phi] {
            let alpha = sp.edge_faces[e][other];
            if sp.class[alpha] != 2 || !sp.face_edges[alpha].iter().any(|&x| is_12(x)) {
                continue;
            }
            let a2 = sp.dual[alpha][0];
            if sp.class[a2] == 0 && sp.empty[a2] {
                send(Rule::R7, a2, Some(alpha), 1);
            }
        }
        let phi_verts: HashSet<usize> = sp.h().faces()[phi].iter().copied().collect();
        for beta in sp.faces_on(other) {
            if sp.class[beta] != 2 {
                continue;
            }
            let shared = sp.h().faces()[beta].iter().filter(|v| phi_verts.contains(v)).count();
            if shared != 1 || !sp.face_edges[beta].iter().all(|&x| is_12(x)) {
                continue;
            }
            let b2 = sp.dual[beta][0];
            if sp.class[b2] == 0 && sp.empty[b2] {
                send(Rule::R8, b2, Some(beta), 1);
            }
        }
    }

    let mut seen: HashMap<(usize, usize, Option<usize>), Rule> = HashMap::new();
    for t in &out {
        let Source::Face(src) = t.src else { unreachable!() };
        if seen.insert((src, t.dst, t.via), t.rule).is_some() {
            return Err(DischargeError::RuleAmbiguity { rule: t.rule, src: sp.label(src), dst: sp.label(t.dst) });
        }
    }
    let mut w2 = ledger.w1.clone();
    for t in &out {
        if let Source::Face(src) = t.src {
            w2[src] -= t.amount_sixths;
        }
        w2[t.dst] += t.amount_sixths;
    }
    ledger.w2 = w2;
    ledger.transfers.extend(out);
    Ok(ledger)
}

/// Replays the face-to-face transfers of a ledger from `w1`.
pub fn replay(ledger: &WeightLedger) -> Vec<i64> {
    let mut w = ledger.w1.clone();
    for t in &ledger.transfers {
        if let Source::Face(src) = t.src {
            w[src] -= t.amount_sixths;
            w[t.dst] += t.amount_sixths;
        }
    }
    w
}

/// Rules P1 to P4: each 2-face of side `i` hands points to faces of the
/// other side, whose branches are `other_branches`.
pub fn distribute_points(sp: &SidePartition, i: usize, other_branches: &[Branch]) -> WeightLedger {
    let o = 1 - i;
    let branch_of: HashMap<usize, &Branch> = other_branches.iter().map(|b| (b.owner(), b)).collect();
    let mut ledger = WeightLedger { points: vec![0; sp.class.len()], ..Default::default() };
    let award = |ledger: &mut WeightLedger, rule, alpha, dst: usize| {
        ledger.points[dst] += 1;
        ledger.awards.push((rule, alpha, dst));
    };
    for alpha in sp.faces_on(i).filter(|&f| sp.class[f] == 2) {
        let (phi, psi) = (sp.edge_faces[sp.face_edges[alpha][0]][o], sp.edge_faces[sp.face_edges[alpha][1]][o]);
        match (sp.class[phi], sp.class[psi]) {
            (2, 2) => {
                award(&mut ledger, Rule::P1, alpha, branch_of[&phi].end());
                award(&mut ledger, Rule::P1, alpha, branch_of[&psi].end());
            }
            (1, 1) => {
                award(&mut ledger, Rule::P2, alpha, phi);
                award(&mut ledger, Rule::P2, alpha, psi);
            }
            (a, _) => {
                let (two, one) = if a == 2 { (phi, psi) } else { (psi, phi) };
                let b = branch_of[&two];
                if b.faces.contains(&one) {
                    award(&mut ledger, Rule::P4, alpha, one);
                } else {
                    award(&mut ledger, Rule::P3, alpha, b.end());
                    award(&mut ledger, Rule::P3, alpha, one);
                }
            }
        }
    }
    ledger
}

/// Checks that `f1 + 2 f0` covers the points given to empty faces.
pub fn check_point_cover(sp: &SidePartition, o: usize, ledger: &WeightLedger) -> Result<()> {
    let total: u32 = sp.faces_on(o).filter(|&f| sp.empty[f]).map(|f| ledger.points[f]).sum();
    let cover = sp.f(o, 1) + 2 * sp.f(o, 0);
    if (cover as u32) < total {
        return Err(DischargeError::PointCoverViolation { total, cover });
    }
    Ok(())
}

/// The per-face bounds behind the point cover: a 1-face holds at most one
/// point, a 0-face at most two and only when empty. These can fail while
/// the cover itself holds, e.g. when one 2-face borders two point-giving
/// faces and its branch end is credited twice.
pub fn check_point_caps(sp: &SidePartition, o: usize, ledger: &WeightLedger) -> Result<()> {
    for f in sp.faces_on(o) {
        let p = ledger.points[f];
        let ok = match sp.class[f] {
            1 => p <= 1,
            0 => p <= 2 && (p == 0 || sp.empty[f]),
            _ => p == 0,
        };
        if !ok {
            return Err(DischargeError::PointCap { face: sp.label(f), class: sp.class[f], points: p });
        }
    }
    Ok(())
}

/// Checks that the other side has `f1 + 2 f0 >= 4`.
pub fn check_point_supply(sp: &SidePartition, o: usize) -> Result<()> {
    let value = sp.f(o, 1) + 2 * sp.f(o, 0);
    if value < 4 {
        return Err(DischargeError::PointSupplyTooSmall { value });
    }
    Ok(())
}

/// Per-claim outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    PotentialCounterexampleOrBug,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FCounts {
    pub f0: usize,
    pub f1: usize,
    pub f2: usize,
    /// 0-faces including non-empty ones.
    pub zero_faces: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferRecord {
    pub rule: Rule,
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via: Option<Vec<usize>>,
    pub amount_sixths: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointRecord {
    pub rule: Rule,
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RerouteRecord {
    pub kind: String,
    pub branch: Vec<usize>,
    /// Position of `v1` on the reported cycle.
    pub v1: usize,
    pub forward: bool,
    pub r: usize,
    pub phi_r: Vec<usize>,
    pub designated_edge: [usize; 2],
    pub cycle: Vec<usize>,
    pub phi_r_empty: bool,
}

/// Every claim name a report carries.
pub const CLAIMS: &[&str] = &[
    "claim1",
    "claim2",
    "claim3",
    "claim4",
    "claim5",
    "claim6",
    "conservation_w1",
    "conservation_w2",
    "per_face_w2_max",
    "case1_identity",
    "case2_chain",
    "k_ge_bound",
    "circ_ge_k",
    "good_cycle_exists",
    "hamiltonian",
    "k_at_least_7",
    "face_count",
    "nonempty_count",
    "no_three_face",
    "sides",
    "side_counts",
    "weak_duals",
    "w1_table",
    "transfer_replay",
    "zero_face_branches",
    "no_extendable_edge",
    "cuts_are_separating_triangles",
];

/// Intermediate proof steps a report carries.
pub const PROOF_STEPS: &[&str] = &["point_caps"];

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub k: usize,
    pub bound: usize,
    pub circ: usize,
    pub case: Option<u8>,
    pub side_i: Option<u8>,
    pub verdict: Verdict,
    pub cycle: Vec<usize>,
    pub f_counts: BTreeMap<String, FCounts>,
    pub empty_faces: usize,
    pub nonempty_faces: usize,
    pub claims: BTreeMap<String, Status>,
    /// Intermediate steps of the proofs that do not decide the verdict.
    pub proof_steps: BTreeMap<String, Status>,
    pub transfers: Vec<TransferRecord>,
    pub points: Vec<PointRecord>,
    pub reroutes: Vec<RerouteRecord>,
    pub witnesses: BTreeMap<String, Vec<String>>,
    pub cycles_checked: usize,
    pub cycles_failing: usize,
}

impl VerificationReport {
    fn new(n: usize, circ: usize) -> Self {
        VerificationReport {
            n,
            k: 0,
            bound: bound(n),
            circ,
            case: None,
            side_i: None,
            verdict: Verdict::Pass,
            cycle: Vec::new(),
            f_counts: BTreeMap::new(),
            empty_faces: 0,
            nonempty_faces: 0,
            claims: CLAIMS.iter().map(|c| (c.to_string(), Status::NotApplicable)).collect(),
            proof_steps: PROOF_STEPS.iter().map(|c| (c.to_string(), Status::NotApplicable)).collect(),
            transfers: Vec::new(),
            points: Vec::new(),
            reroutes: Vec::new(),
            witnesses: BTreeMap::new(),
            cycles_checked: 0,
            cycles_failing: 0,
        }
    }

    /// Records a check. A failure is sticky and carries a witness.
    fn check(&mut self, claim: &str, ok: bool, witness: impl FnOnce() -> String) {
        let slot = self.claims.get_mut(claim).expect("known claim");
        if ok {
            if *slot != Status::Fail {
                *slot = Status::Pass;
            }
        } else {
            *slot = Status::Fail;
            self.witnesses.entry(claim.to_string()).or_default().push(witness());
            self.verdict = Verdict::PotentialCounterexampleOrBug;
        }
    }

    /// Records an intermediate proof step; failures keep a witness but do
    /// not change the verdict.
    fn note(&mut self, step: &str, r: Result<()>) {
        let slot = self.proof_steps.get_mut(step).expect("known step");
        match r {
            Ok(()) if *slot != Status::Fail => *slot = Status::Pass,
            Ok(()) => {}
            Err(e) => {
                *slot = Status::Fail;
                self.witnesses.entry(step.to_string()).or_default().push(e.to_string());
            }
        }
    }

    fn check_result<T>(&mut self, claim: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => {
                self.check(claim, true, String::new);
                Some(v)
            }
            Err(e) => {
                self.check(claim, false, || e.to_string());
                None
            }
        }
    }

    pub fn status(&self, claim: &str) -> Status {
        self.claims[claim]
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Claims that failed, in name order.
    pub fn failures(&self) -> Vec<&str> {
        self.claims.iter().filter(|(_, &s)| s == Status::Fail).map(|(c, _)| c.as_str()).collect()
    }
}

/// `ceil(2 (n + 4) / 3)`.
pub fn bound(n: usize) -> usize {
    (2 * (n + 4)).div_ceil(3)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    pub budget: Budget,
    /// Re-verify every longest good cycle, not just the first one found.
    pub all_longest_good: bool,
}

/// Runs the whole argument on `g`: Hamiltonicity for `n <= 10`, otherwise a
/// longest good cycle, the case dispatch and every claim along the way.
pub fn verify_bound(g: &Triangulation, opts: &VerifyOptions) -> Result<VerificationReport> {
    let n = g.n();
    if n < 8 {
        return Err(DischargeError::PreconditionFailed(format!("n = {n} < 8")));
    }
    if !g.is_essentially_4_connected() {
        return Err(DischargeError::PreconditionFailed("graph is not essentially 4-connected".into()));
    }
    let (circ, witness) = circumference(g, &opts.budget)?;
    let mut report = VerificationReport::new(n, circ);
    let cuts_ok = three_cuts(g).map(|c| c == separating_triangles(g)).unwrap_or(false);
    report.check("cuts_are_separating_triangles", cuts_ok, || "3-cuts differ from separating triangles".into());
    report.check("face_count", g.faces().len() == 2 * n - 4, || format!("{} faces", g.faces().len()));

    if n <= 10 {
        report.k = circ;
        report.cycle = witness;
        report.cycles_checked = 1;
        report.check("hamiltonian", circ == n, || format!("circumference {circ} < n = {n}"));
        let b = report.bound;
        report.check("k_ge_bound", 3 * circ >= 2 * (n + 4), || format!("k = {circ} < {b}"));
        report.check("circ_ge_k", true, String::new);
        return Ok(report);
    }

    let first = match longest_good_cycle(g, &opts.budget) {
        Ok(c) => c,
        Err(CycleError::NoGoodCycle) => {
            report.check("good_cycle_exists", false, || "no good cycle".into());
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    let cycles = if opts.all_longest_good { good_cycles_of_length(g, first.len(), &opts.budget)? } else { vec![first] };
    let mut chosen: Option<VerificationReport> = None;
    let mut failing = 0;
    for c in &cycles {
        let mut r = report.clone();
        analyse(g, c, &mut r)?;
        if !r.passed() {
            failing += 1;
        }
        let replace = match &chosen {
            None => true,
            Some(prev) => prev.passed() && !r.passed(),
        };
        if replace {
            chosen = Some(r);
        }
    }
    let mut out = chosen.expect("at least one longest good cycle");
    out.cycles_checked = cycles.len();
    out.cycles_failing = failing;
    Ok(out)
}

/// Verifies every claim for one longest good cycle `c`.
fn analyse(g: &Triangulation, c: &GoodCycle, rep: &mut VerificationReport) -> Result<()> {
    let n = g.n();
    let k = c.len();
    rep.k = k;
    rep.cycle = c.verts().to_vec();
    rep.check("good_cycle_exists", true, String::new);
    rep.check("k_ge_bound", 3 * k >= 2 * (n + 4), || format!("k = {k} < {}", bound(n)));
    let circ = rep.circ;
    rep.check("circ_ge_k", circ >= k, || format!("circumference {circ} < k = {k}"));
    rep.check("k_at_least_7", k >= 7, || format!("k = {k}"));
    let ext = extendable_edges(g, c);
    rep.check("no_extendable_edge", ext.is_empty(), || format!("{:?}", ext[0]));
    if k < 4 {
        return Ok(());
    }

    let sp = match build_side_partition(g, c) {
        Ok(sp) => sp,
        Err(e @ DischargeError::ThreeFaceFound(_)) => {
            rep.check("no_three_face", false, || e.to_string());
            return Ok(());
        }
        Err(e @ DischargeError::ChordConflict(_)) => {
            rep.check("sides", false, || e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    rep.check("no_three_face", true, String::new);
    rep.check("sides", true, String::new);
    let h = sp.h();
    rep.check("face_count", h.faces().len() == 2 * k - 4, || format!("H has {} faces", h.faces().len()));
    let ef = sp.empty.iter().filter(|&&e| e).count();
    rep.empty_faces = ef;
    rep.nonempty_faces = sp.empty.len() - ef;
    let ne = rep.nonempty_faces;
    rep.check("nonempty_count", ne == n - k, || format!("{ne} non-empty faces, {} vertices off the cycle", n - k));
    for s in 0..2 {
        rep.f_counts.insert(
            (s + 1).to_string(),
            FCounts { f0: sp.f(s, 0), f1: sp.f(s, 1), f2: sp.f(s, 2), zero_faces: sp.zero_faces(s) },
        );
        let count = |j| sp.faces_on(s).filter(|&f| sp.class[f] == j).count();
        let (c0, c1, c2) = (count(0), count(1), count(2));
        rep.check("side_counts", 2 * c2 + c1 == k && c0 + c1 + c2 == k - 2, || {
            format!("side {}: {c0} 0-faces, {c1} 1-faces, {c2} 2-faces, k = {k}", s + 1)
        });
    }
    rep.check_result("weak_duals", check_weak_duals(&sp));
    if rep.check_result("claim1", check_cycle_faces_empty(&sp)).is_none() {
        return Ok(());
    }

    let has_p = |s: usize| sp.zero_faces(s) >= 2 || sp.faces_on(s).any(|f| sp.class[f] == 0 && !sp.empty[f]);
    let sides_with_branches: Vec<usize> = (0..2).filter(|&s| sp.zero_faces(s) > 0).collect();
    let mut all_branches: [Vec<Branch>; 2] = [Vec::new(), Vec::new()];
    for &s in &sides_with_branches {
        match rep.check_result("claim2", branches(&sp, s)) {
            Some(b) => all_branches[s] = b,
            None => return Ok(()),
        }
    }
    for &s in &sides_with_branches {
        check_branch_membership(&sp, s, &all_branches[s], has_p(0) && has_p(1), rep);
        check_reroutes(g, &sp, s, &all_branches[s], rep);
    }

    if has_p(0) && has_p(1) {
        rep.case = Some(1);
        case1(&sp, n, &all_branches, rep);
    } else {
        rep.case = Some(2);
        let i = if has_p(0) { 1 } else { 0 };
        rep.side_i = Some(i as u8 + 1);
        case2(&sp, n, i, &all_branches[1 - i], rep);
        if !has_p(1 - i) {
            case2(&sp, n, 1 - i, &all_branches[i], rep);
        }
    }
    Ok(())
}

/// A 1-face lies in at most one branch and, in Case 1, an empty 0-face in
/// at most two.
fn check_branch_membership(sp: &SidePartition, s: usize, bs: &[Branch], case1: bool, rep: &mut VerificationReport) {
    let mut count: HashMap<usize, usize> = HashMap::new();
    for b in bs {
        for &f in &b.faces[1..] {
            *count.entry(f).or_default() += 1;
        }
    }
    if sp.zero_faces(s) >= 2 {
        for (&f, &c) in &count {
            if sp.class[f] == 1 {
                rep.check("claim4", c <= 1, || format!("1-face {:?} in {c} branches", sp.label(f)));
            }
        }
        rep.check("claim4", true, String::new);
    }
    if case1 {
        for (&f, &c) in &count {
            if sp.class[f] == 0 && sp.empty[f] {
                rep.check("zero_face_branches", c <= 2, || format!("empty 0-face {:?} in {c} branches", sp.label(f)));
            }
        }
        rep.check("zero_face_branches", true, String::new);
    }
}

/// Detects the rerouting configurations around each branch owner in both
/// orientations, executes the move and checks that the far end of the
/// branch is empty.
fn check_reroutes(g: &Triangulation, sp: &SidePartition, s: usize, bs: &[Branch], rep: &mut VerificationReport) {
    let k = sp.k() as isize;
    let o = 1 - s;
    for b in bs {
        let phi = b.owner();
        let r = b.r();
        let (e1, e2) = (sp.face_edges[phi][0], sp.face_edges[phi][1]);
        // the middle vertex is shared by both cycle edges of phi
        let p2 = if (e1 + 1) % sp.k() == e2 { e2 } else { e1 } as isize;
        let rim: HashSet<usize> = b.rim.iter().copied().collect();
        for dir in [1isize, -1] {
            let at = |j: isize| (p2 + dir * (j - 2)).rem_euclid(k) as usize;
            if !sp.is_chord_on(o, at(0), at(2)) {
                continue;
            }
            let range = |lo: isize, hi: isize| (lo..=hi).map(at).collect::<HashSet<_>>();
            let kind = if rim == range(1, r as isize + 1) {
                RerouteKind::RimFromV1
            } else if rim == range(0, r as isize) && sp.is_chord_on(o, at(-1), at(2)) {
                let e = sp.edge_index(sp.h_cycle[at(0)], sp.h_cycle[at(1)]).unwrap();
                let f = sp.edge_faces[e][s];
                let third = sp.h().faces()[f]
                    .iter()
                    .copied()
                    .find(|&v| v != sp.h_cycle[at(0)] && v != sp.h_cycle[at(1)])
                    .unwrap();
                if third == sp.h_cycle[at(r as isize)] {
                    RerouteKind::RimFromV0Fan
                } else {
                    RerouteKind::RimFromV0Split
                }
            } else {
                continue;
            };
            let mv = RerouteMove { kind, v1: at(1), forward: dir == 1, r };
            let end = b.end();
            match cycles::reroute(g, &sp.cycle, &mv) {
                Ok(c2) => {
                    let (x, y) = mv.designated_edge(&sp.cycle);
                    let end_g = sp.label(end);
                    let on_end = end_g.contains(&x) && end_g.contains(&y);
                    let ok = c2.len() == sp.k() && on_end && sp.empty[end];
                    rep.check("claim3", ok, || {
                        format!(
                            "{kind:?} at {:?}: edge {x}-{y}, far face {:?} empty = {}",
                            sp.label(phi),
                            end_g,
                            sp.empty[end]
                        )
                    });
                    rep.reroutes.push(RerouteRecord {
                        kind: format!("{kind:?}"),
                        branch: sp.label(phi).to_vec(),
                        v1: mv.v1,
                        forward: mv.forward,
                        r,
                        phi_r: end_g.to_vec(),
                        designated_edge: [x, y],
                        cycle: c2.into_verts(),
                        phi_r_empty: sp.empty[end],
                    });
                }
                Err(e) => rep.check("claim3", false, || format!("{kind:?} at {:?}: {e}", sp.label(phi))),
            }
        }
    }
}

fn case1(sp: &SidePartition, n: usize, branches: &[Vec<Branch>; 2], rep: &mut VerificationReport) {
    let k = sp.k() as i64;
    let first = redistribute_first(sp);
    let bad_table = (0..sp.class.len()).find(|&f| sp.empty[f] && first.w1[f] != expected_w1(sp, f));
    rep.check("w1_table", bad_table.is_none(), || {
        let f = bad_table.unwrap();
        format!("face {:?}: w1 = {}/6, expected {}/6", sp.label(f), first.w1[f], expected_w1(sp, f))
    });
    let sum_empty = |w: &[i64]| (0..w.len()).filter(|&f| sp.empty[f]).map(|f| w[f]).sum::<i64>();
    let w0: i64 = first.w0.iter().sum();
    rep.check("conservation_w1", w0 == 6 * k && sum_empty(&first.w1) == 6 * k, || {
        format!("sum w0 = {w0}/6, sum w1 = {}/6, k = {k}", sum_empty(&first.w1))
    });
    let Some(ledger) = rep.check_result("transfer_replay", redistribute_second(sp, first, branches)) else {
        return;
    };
    rep.check("conservation_w2", sum_empty(&ledger.w2) == 6 * k, || {
        format!("sum w2 = {}/6, k = {k}", sum_empty(&ledger.w2))
    });
    let nonempty_weight = (0..ledger.w2.len()).find(|&f| !sp.empty[f] && ledger.w2[f] != 0);
    rep.check("conservation_w2", nonempty_weight.is_none(), || {
        format!("non-empty face {:?} holds weight", sp.label(nonempty_weight.unwrap()))
    });
    for f in 0..ledger.w2.len() {
        if sp.empty[f] {
            rep.check("per_face_w2_max", ledger.w2[f] <= 4, || {
                format!("face {:?}: w2 = {}/6", sp.label(f), ledger.w2[f])
            });
        }
    }
    let replayed = replay(&ledger);
    let amounts_ok = ledger.transfers.iter().all(|t| (1..=6).contains(&t.amount_sixths));
    rep.check("transfer_replay", replayed == ledger.w2 && amounts_ok, || "replayed log disagrees with w2".into());

    let ef = rep.empty_faces;
    let (n, kk) = (n as i64, sp.k() as i64);
    rep.check("case1_identity", 2 * n - 4 == ef as i64 + 3 * (n - kk), || {
        format!("2n - 4 = {} but ef + 3(n - k) = {}", 2 * n - 4, ef as i64 + 3 * (n - kk))
    });
    rep.check("case1_identity", 3 * kk <= 2 * ef as i64, || format!("3k = {} > 2 ef = {}", 3 * kk, 2 * ef));

    let label = |src: Source| match src {
        Source::Edge(e) => {
            let (a, b) = (sp.cycle.verts()[e], sp.cycle.verts()[(e + 1) % sp.k()]);
            vec![a.min(b), a.max(b)]
        }
        Source::Face(f) => sp.label(f).to_vec(),
    };
    rep.transfers = ledger
        .transfers
        .iter()
        .map(|t| TransferRecord {
            rule: t.rule,
            src: label(t.src),
            dst: sp.label(t.dst).to_vec(),
            via: t.via.map(|f| sp.label(f).to_vec()),
            amount_sixths: t.amount_sixths,
        })
        .collect();
}

fn case2(sp: &SidePartition, n: usize, i: usize, other_branches: &[Branch], rep: &mut VerificationReport) {
    let k = sp.k();
    let o = 1 - i;
    let side_i_empty = sp.faces_on(i).all(|f| sp.empty[f]);
    rep.check("case2_chain", side_i_empty, || format!("side {} has a non-empty face", i + 1));
    if sp.zero_faces(o) < 2 {
        rep.check("case2_chain", n <= k + 1, || format!("n = {n} > k + 1 = {}", k + 1));
        return;
    }
    let points = distribute_points(sp, i, other_branches);
    rep.check_result("claim5", check_point_cover(sp, o, &points));
    rep.note("point_caps", check_point_caps(sp, o, &points));
    rep.check_result("claim6", check_point_supply(sp, o));
    let (f0, f1, f2) = (sp.f(o, 0), sp.f(o, 1), sp.f(o, 2));
    let ne = rep.nonempty_faces;
    rep.check("case2_chain", 2 * f2 + f1 == k, || format!("2 f2 + f1 = {} != k = {k}", 2 * f2 + f1));
    rep.check("case2_chain", 2 * ne + 4 + f1 + 2 * f0 == k, || {
        format!("2 * {ne} non-empty faces + 4 + f1 + 2 f0 = {} != k = {k}", 2 * ne + 4 + f1 + 2 * f0)
    });
    rep.check("case2_chain", 2 * ne + 8 <= k, || format!("{ne} non-empty faces > k/2 - 4"));
    rep.check("case2_chain", 2 * n + 8 <= 3 * k, || format!("n = {n} > k + k/2 - 4"));
    rep.points.extend(points.awards.iter().map(|&(rule, a, d)| PointRecord {
        rule,
        src: sp.label(a).to_vec(),
        dst: sp.label(d).to_vec(),
    }));
}
