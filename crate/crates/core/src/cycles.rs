//! Exact longest-cycle and longest-good-cycle search, extension moves and
//! the same-length rerouting moves used to certify empty faces.
//!
//! A cycle is *good* when the vertices it misses form an independent set
//! of degree-3 vertices. Search is depth-first path extension anchored at
//! the smallest vertex of the cycle, neighbors in ascending order, with a
//! branch-and-bound cut on
//!
//! * the vertices still reachable from the path end, and
//! * an independent set `I`: a cycle through `c` vertices outside `I`
//!   meets at most `c` vertices of `I`.
//!
//! Witnesses are deterministic: the first cycle of maximum length in that
//! order.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::embedding::Embedding;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycleError {
    #[error("graph has no cycle")]
    Acyclic,
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("cycle is not good: {0}")]
    NotGood(String),
    #[error("edge {x}-{y} is not extendable")]
    NotExtendable { x: usize, y: usize },
    #[error("no good cycle exists")]
    NoGoodCycle,
    #[error("search exceeded its time budget")]
    Timeout,
    #[error("reroute configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("exact search supports at most 128 vertices, got {n}")]
    TooLarge { n: usize },
}

/// Wall-clock limit for a search.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None }
    }

    pub fn seconds(secs: f64) -> Self {
        Budget::from_duration(Duration::from_secs_f64(secs))
    }

    pub fn from_duration(d: Duration) -> Self {
        Budget { deadline: Some(Instant::now() + d) }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// A good cycle of a fixed graph: consecutive vertices adjacent, all
/// distinct, and the missed vertices independent and of degree 3.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodCycle {
    verts: Vec<usize>,
    outside: Vec<usize>,
}

impl GoodCycle {
    pub fn new(g: &Embedding, verts: Vec<usize>) -> Result<GoodCycle, CycleError> {
        check_cycle(g, &verts)?;
        let outside = outside_of(g, &verts);
        if let Some(&x) = outside.iter().find(|&&x| g.degree(x) != 3) {
            return Err(CycleError::NotGood(format!("outside vertex {x} has degree {}", g.degree(x))));
        }
        for &x in &outside {
            if let Some(&y) = outside.iter().find(|&&y| g.has_edge(x, y)) {
                return Err(CycleError::NotGood(format!("outside vertices {x} and {y} are adjacent")));
            }
        }
        Ok(GoodCycle { verts, outside })
    }

    pub fn verts(&self) -> &[usize] {
        &self.verts
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Vertices not on the cycle, ascending.
    pub fn outside(&self) -> &[usize] {
        &self.outside
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.verts.iter().position(|&w| w == v)
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        let k = self.verts.len();
        (0..k).any(|i| {
            let (a, b) = (self.verts[i], self.verts[(i + 1) % k]);
            (a, b) == (u, v) || (a, b) == (v, u)
        })
    }

    pub fn into_verts(self) -> Vec<usize> {
        self.verts
    }
}

fn outside_of(g: &Embedding, verts: &[usize]) -> Vec<usize> {
    let mut on = vec![false; g.n()];
    for &v in verts {
        on[v] = true;
    }
    (0..g.n()).filter(|&v| !on[v]).collect()
}

/// Checks that `verts` is a cycle of `g` (length at least 3).
pub fn check_cycle(g: &Embedding, verts: &[usize]) -> Result<(), CycleError> {
    let k = verts.len();
    if k < 3 {
        return Err(CycleError::NotACycle(format!("length {k} < 3")));
    }
    let mut seen = vec![false; g.n()];
    for &v in verts {
        if v >= g.n() {
            return Err(CycleError::NotACycle(format!("vertex {v} out of range")));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(CycleError::NotACycle(format!("vertex {v} repeated")));
        }
    }
    for i in 0..k {
        let (a, b) = (verts[i], verts[(i + 1) % k]);
        if !g.has_edge(a, b) {
            return Err(CycleError::NotACycle(format!("{a}-{b} is not an edge")));
        }
    }
    Ok(())
}

/// Whether the cycle `verts` of `g` is good.
pub fn is_good_cycle(g: &Embedding, verts: &[usize]) -> Result<bool, CycleError> {
    check_cycle(g, verts)?;
    match GoodCycle::new(g, verts.to_vec()) {
        Ok(_) => Ok(true),
        Err(CycleError::NotGood(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Cycle edges `xy` whose endpoints share a neighbor `z` off the cycle,
/// each with the smallest such `z`.
pub fn extendable_edges(g: &Embedding, c: &GoodCycle) -> Vec<((usize, usize), usize)> {
    let k = c.len();
    let mut out = Vec::new();
    for i in 0..k {
        let (x, y) = (c.verts[i], c.verts[(i + 1) % k]);
        if let Some(&z) = c.outside.iter().find(|&&z| g.has_edge(x, z) && g.has_edge(y, z)) {
            out.push(((x, y), z));
        }
    }
    out
}

/// Replaces the cycle edge `xy` by the detour `x z y`.
pub fn extend(g: &Embedding, c: &GoodCycle, edge: (usize, usize)) -> Result<GoodCycle, CycleError> {
    let (x, y) = edge;
    let not_ext = CycleError::NotExtendable { x, y };
    let k = c.len();
    let i = c.position(x).ok_or(not_ext.clone())?;
    let ins = if c.verts[(i + 1) % k] == y {
        i + 1
    } else if c.verts[(i + k - 1) % k] == y {
        i
    } else {
        return Err(not_ext);
    };
    let z = *c.outside.iter().find(|&&z| g.has_edge(x, z) && g.has_edge(y, z)).ok_or(not_ext)?;
    let mut verts = c.verts.clone();
    verts.insert(ins, z);
    GoodCycle::new(g, verts)
}

/// Applies [`extend`] until no edge is extendable.
pub fn extend_fully(g: &Embedding, c: &GoodCycle) -> GoodCycle {
    let mut cur = c.clone();
    while let Some(&(e, _)) = extendable_edges(g, &cur).first() {
        cur = extend(g, &cur, e).expect("listed edge is extendable");
    }
    cur
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    Longest,
    /// Collect every cycle of exactly this length, once per orientation class.
    Enumerate(usize),
}

struct Search<'a> {
    n: usize,
    all: u128,
    adj: Vec<u128>,
    nbrs: Vec<Vec<usize>>,
    deg3: u128,
    indep: u128,
    good: bool,
    goal: Goal,
    best: Vec<usize>,
    found: Vec<Vec<usize>>,
    nodes: u64,
    budget: &'a Budget,
    timed_out: bool,
}

fn bit(v: usize) -> u128 {
    1u128 << v
}

fn count(m: u128) -> usize {
    m.count_ones() as usize
}

fn members(mut m: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

impl<'a> Search<'a> {
    fn new(g: &Embedding, good: bool, goal: Goal, budget: &'a Budget) -> Result<Self, CycleError> {
        let n = g.n();
        if n > 128 {
            return Err(CycleError::TooLarge { n });
        }
        let adj: Vec<u128> = (0..n).map(|v| g.rotation(v).iter().fold(0u128, |m, &u| m | bit(u))).collect();
        let nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.sorted_neighbors(v)).collect();
        let deg3 = (0..n).filter(|&v| g.degree(v) == 3).fold(0u128, |m, v| m | bit(v));
        // greedy maximal independent set, low degree first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (g.degree(v), v));
        let mut indep = 0u128;
        for v in order {
            if adj[v] & indep == 0 {
                indep |= bit(v);
            }
        }
        let all = if n == 128 { u128::MAX } else { bit(n) - 1 };
        Ok(Search {
            n,
            all,
            adj,
            nbrs,
            deg3,
            indep,
            good,
            goal,
            best: Vec::new(),
            found: Vec::new(),
            nodes: 0,
            budget,
            timed_out: false,
        })
    }

    fn excluded_ok(&self, excluded: u128) -> bool {
        if excluded & !self.deg3 != 0 {
            return false;
        }
        members(excluded).all(|x| self.adj[x] & excluded == 0)
    }

    fn run(&mut self) {
        for s in 0..self.n {
            if self.good {
                let prefix = bit(s) - 1;
                if !self.excluded_ok(prefix) {
                    break;
                }
            }
            if let Goal::Longest = self.goal {
                if self.n - s <= self.best.len() {
                    break;
                }
            }
            let allowed = self.all & !(bit(s) - 1);
            let mut path = vec![s];
            self.dfs(&mut path, bit(s), allowed);
            if self.timed_out {
                return;
            }
        }
    }

    fn dfs(&mut self, path: &mut Vec<usize>, on: u128, allowed: u128) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.budget.expired() {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let s = path[0];
        let end = *path.last().unwrap();
        let len = path.len();

        if len >= 3 && self.adj[end] & bit(s) != 0 {
            let ok = !self.good || self.excluded_ok(self.all & !on);
            if ok {
                match self.goal {
                    Goal::Longest => {
                        if len > self.best.len() {
                            self.best = path.clone();
                        }
                    }
                    Goal::Enumerate(t) => {
                        if len == t && path[1] < end {
                            self.found.push(path.clone());
                        }
                    }
                }
            }
        }

        let avail = allowed & !on;
        // vertices reachable from the path end through unused vertices
        let mut reach = 0u128;
        let mut frontier = self.adj[end] & avail;
        while frontier != 0 {
            reach |= frontier;
            let mut next = 0u128;
            for v in members(frontier) {
                next |= self.adj[v];
            }
            frontier = next & avail & !reach;
        }
        if reach == 0 {
            return;
        }
        if self.adj[s] & (reach | bit(end)) == 0 {
            return;
        }
        if self.good && !self.excluded_ok((self.all & !allowed) | (avail & !reach)) {
            return;
        }
        // a cycle vertex off the path needs two usable neighbors
        let usable = reach | bit(end) | bit(s);
        let live = members(reach).filter(|&v| count(self.adj[v] & usable) >= 2).fold(0u128, |m, v| m | bit(v));
        let outer_i = count((on | live) & self.indep);
        let outer_rest = count((on | live) & !self.indep);
        let bound = (len + count(live)).min(outer_rest + outer_i.min(outer_rest));
        let cut = match self.goal {
            Goal::Longest => bound <= self.best.len(),
            Goal::Enumerate(t) => bound < t,
        };
        if cut {
            return;
        }

        for i in 0..self.nbrs[end].len() {
            let w = self.nbrs[end][i];
            if avail & bit(w) == 0 {
                continue;
            }
            path.push(w);
            self.dfs(path, on | bit(w), allowed);
            path.pop();
            if self.timed_out {
                return;
            }
        }
    }
}

/// Length of a longest cycle and the first witness in search order.
pub fn circumference(g: &Embedding, budget: &Budget) -> Result<(usize, Vec<usize>), CycleError> {
    let mut s = Search::new(g, false, Goal::Longest, budget)?;
    s.run();
    if s.timed_out {
        return Err(CycleError::Timeout);
    }
    if s.best.is_empty() {
        return Err(CycleError::Acyclic);
    }
    Ok((s.best.len(), s.best))
}

/// A Hamiltonian cycle, if one exists.
pub fn hamiltonian_cycle(g: &Embedding, budget: &Budget) -> Result<Option<Vec<usize>>, CycleError> {
    match circumference(g, budget) {
        Ok((len, c)) if len == g.n() => Ok(Some(c)),
        Ok(_) | Err(CycleError::Acyclic) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn is_hamiltonian(g: &Embedding) -> bool {
    matches!(hamiltonian_cycle(g, &Budget::unlimited()), Ok(Some(_)))
}

/// A longest good cycle (first in search order).
pub fn longest_good_cycle(g: &Embedding, budget: &Budget) -> Result<GoodCycle, CycleError> {
    let mut s = Search::new(g, true, Goal::Longest, budget)?;
    s.run();
    if s.timed_out {
        return Err(CycleError::Timeout);
    }
    if s.best.is_empty() {
        return Err(CycleError::NoGoodCycle);
    }
    GoodCycle::new(g, s.best)
}

/// Every good cycle of length `len`, one per cyclic sequence up to
/// reversal, each starting at its smallest vertex.
pub fn good_cycles_of_length(g: &Embedding, len: usize, budget: &Budget) -> Result<Vec<GoodCycle>, CycleError> {
    let mut s = Search::new(g, true, Goal::Enumerate(len), budget)?;
    s.run();
    if s.timed_out {
        return Err(CycleError::Timeout);
    }
    s.found.into_iter().map(|c| GoodCycle::new(g, c)).collect()
}

/// Every longest good cycle.
pub fn all_longest_good_cycles(g: &Embedding, budget: &Budget) -> Result<Vec<GoodCycle>, CycleError> {
    let first = longest_good_cycle(g, budget)?;
    good_cycles_of_length(g, first.len(), budget)
}

/// The same-length rerouting moves along a branch rim.
///
/// Vertices are named along the cycle from `v1` in the chosen direction:
/// `v0` precedes `v1`, `v_{-1}` precedes `v0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RerouteKind {
    /// Rim `(v1, ..., v_{r+1})`: replace `(v0, v1, ..., v_{r+1})` by
    /// `(v0, v2, ..., v_r, v1, v_{r+1})`; the result uses `v1 v_{r+1}`.
    RimFromV1,
    /// Rim `(v0, ..., v_r)` with the face on `v0 v1` also at `v_r`: replace
    /// `(v_{-1}, v0, ..., v_r)` by `(v_{-1}, v2, ..., v_{r-1}, v1, v0, v_r)`.
    RimFromV0Fan,
    /// Rim `(v0, ..., v_r)` otherwise: replace `(v_{-1}, v0, ..., v_r)` by
    /// `(v_{-1}, v2, v1, v3, ..., v_{r-1}, v0, v_r)`.
    RimFromV0Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RerouteMove {
    pub kind: RerouteKind,
    /// Position of `v1` on the cycle.
    pub v1: usize,
    /// Whether `v2` follows `v1` in the cycle's stored order.
    pub forward: bool,
    /// Branch length.
    pub r: usize,
}

impl RerouteMove {
    fn vertex(&self, c: &GoodCycle, j: isize) -> usize {
        let k = c.len() as isize;
        let step = if self.forward { j - 1 } else { 1 - j };
        c.verts[(self.v1 as isize + step).rem_euclid(k) as usize]
    }

    /// The edge the rerouted cycle is guaranteed to contain.
    pub fn designated_edge(&self, c: &GoodCycle) -> (usize, usize) {
        let r = self.r as isize;
        match self.kind {
            RerouteKind::RimFromV1 => (self.vertex(c, 1), self.vertex(c, r + 1)),
            _ => (self.vertex(c, 0), self.vertex(c, r)),
        }
    }
}

/// Reroutes `c` along a branch rim, keeping its vertex set and length.
pub fn reroute(g: &Embedding, c: &GoodCycle, mv: &RerouteMove) -> Result<GoodCycle, CycleError> {
    let k = c.len() as isize;
    let r = mv.r as isize;
    let min_r = match mv.kind {
        RerouteKind::RimFromV1 | RerouteKind::RimFromV0Fan => 2,
        RerouteKind::RimFromV0Split => 3,
    };
    if r < min_r || r + 2 > k || mv.v1 >= c.len() {
        return Err(CycleError::ConfigMismatch(format!("r = {r} does not fit a cycle of length {k}")));
    }
    let v = |j: isize| mv.vertex(c, j);
    let span = |a: isize, b: isize| (a..=b).map(v).collect::<Vec<_>>();
    let verts: Vec<usize> = match mv.kind {
        RerouteKind::RimFromV1 => [span(r + 1, k), span(2, r), vec![v(1)]].concat(),
        RerouteKind::RimFromV0Fan => [span(r, k - 1), span(2, r - 1), vec![v(1), v(0)]].concat(),
        RerouteKind::RimFromV0Split => [span(r, k - 1), vec![v(2), v(1)], span(3, r - 1), vec![v(0)]].concat(),
    };
    if let Err(CycleError::NotACycle(why)) = check_cycle(g, &verts) {
        return Err(CycleError::ConfigMismatch(why));
    }
    let out = GoodCycle::new(g, verts)?;
    let (a, b) = mv.designated_edge(c);
    if !out.contains_edge(a, b) {
        return Err(CycleError::ConfigMismatch(format!("rerouted cycle misses {a}-{b}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::fixtures::{k4, octahedron};
    use crate::generators::{double_wheel, extremal_expand};

    fn unlimited() -> Budget {
        Budget::unlimited()
    }

    #[test]
    fn small_circumferences() {
        assert_eq!(circumference(&k4(), &unlimited()).unwrap().0, 4);
        assert_eq!(circumference(&octahedron(), &unlimited()).unwrap().0, 6);
        let path = Embedding::from_rotation(vec![vec![1], vec![0, 2], vec![1]]).unwrap();
        assert_eq!(circumference(&path, &unlimited()), Err(CycleError::Acyclic));
    }

    #[test]
    fn extremal_octahedron_circumference() {
        let g = extremal_expand(&octahedron()).unwrap();
        let (len, c) = circumference(&g, &unlimited()).unwrap();
        assert_eq!(len, 12);
        check_cycle(&g, &c).unwrap();
        assert!(!is_hamiltonian(&g));
        assert_eq!(longest_good_cycle(&g, &unlimited()).unwrap().len(), 12);
    }

    #[test]
    fn hamiltonian_inputs() {
        assert!(is_hamiltonian(&octahedron()));
        let dw = double_wheel(6).unwrap();
        let c = longest_good_cycle(&dw, &unlimited()).unwrap();
        assert_eq!(c.len(), 8);
        assert!(c.outside().is_empty());
        assert!(extendable_edges(&dw, &c).is_empty());
    }

    #[test]
    fn good_cycle_checks() {
        let g = extremal_expand(&octahedron()).unwrap();
        // a Hamiltonian cycle of the base misses all inserted vertices,
        // which are independent and of degree 3
        let base_ham = hamiltonian_cycle(&octahedron(), &unlimited()).unwrap().unwrap();
        assert!(is_good_cycle(&g, &base_ham).unwrap());

        let t = octahedron();
        let f = t.faces()[0].clone();
        let s = t.stack([f[0], f[1], f[2]]).unwrap().stack([6, f[0], f[1]]).unwrap();
        // Hamiltonian cycle of the octahedron leaves the adjacent pair 6, 7 out
        assert!(!is_good_cycle(&s, &base_ham).unwrap());
        assert!(matches!(is_good_cycle(&s, &[0, 1]), Err(CycleError::NotACycle(_))));
        assert!(matches!(is_good_cycle(&s, &[4, 5, 0]), Err(CycleError::NotACycle(_))));
    }

    #[test]
    fn extend_reverses_shortcut() {
        let g = extremal_expand(&octahedron()).unwrap();
        let c = longest_good_cycle(&g, &unlimited()).unwrap();
        assert!(extendable_edges(&g, &c).is_empty());
        // drop the first outside-of-base vertex on the cycle: x z y -> x y
        let verts = c.verts().to_vec();
        let i = verts.iter().position(|&v| v >= 6).unwrap();
        let k = verts.len();
        let (x, z, y) = (verts[(i + k - 1) % k], verts[i], verts[(i + 1) % k]);
        let mut short = verts.clone();
        short.remove(i);
        let short = GoodCycle::new(&g, short).unwrap();
        let ext = extendable_edges(&g, &short);
        assert!(ext.iter().any(|&((a, b), w)| (a, b) == (x, y) && w == z));
        let back = extend(&g, &short, (x, y)).unwrap();
        assert_eq!(back.len(), short.len() + 1);
        assert!(is_good_cycle(&g, back.verts()).unwrap());
        assert!(back.contains_edge(x, z) && back.contains_edge(z, y));
        assert_eq!(extend(&g, &c, (x, z)), Err(CycleError::NotExtendable { x, y: z }));
    }

    #[test]
    fn extend_fully_terminates_without_extendable_edges() {
        let g = extremal_expand(&double_wheel(5).unwrap()).unwrap();
        let base = hamiltonian_cycle(&double_wheel(5).unwrap(), &unlimited()).unwrap().unwrap();
        let c = GoodCycle::new(&g, base).unwrap();
        let full = extend_fully(&g, &c);
        assert!(extendable_edges(&g, &full).is_empty());
        assert!(full.len() > c.len());
        assert!(full.len() <= circumference(&g, &unlimited()).unwrap().0);
    }

    #[test]
    fn enumeration_finds_each_cycle_once() {
        let t = octahedron();
        let hams = good_cycles_of_length(&t, 6, &unlimited()).unwrap();
        // the octahedron has 16 undirected Hamiltonian cycles
        assert_eq!(hams.len(), 16);
        let k4_tri = good_cycles_of_length(&k4(), 3, &unlimited()).unwrap();
        assert_eq!(k4_tri.len(), 4);
    }

    #[test]
    fn timeout_is_reported() {
        let g = extremal_expand(&double_wheel(6).unwrap()).unwrap();
        let b = Budget::from_duration(Duration::ZERO);
        // the first clock check happens after 1024 nodes; make sure the
        // search is big enough to get there
        match circumference(&g, &b) {
            Err(CycleError::Timeout) | Ok(_) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reroute_rejects_missing_chords() {
        let t = octahedron();
        let c = GoodCycle::new(&t, hamiltonian_cycle(&t, &unlimited()).unwrap().unwrap()).unwrap();
        let mv = RerouteMove { kind: RerouteKind::RimFromV1, v1: 0, forward: true, r: 9 };
        assert!(matches!(reroute(&t, &c, &mv), Err(CycleError::ConfigMismatch(_))));
    }
}
