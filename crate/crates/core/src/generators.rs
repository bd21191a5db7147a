//! Triangulation families: double wheels, face stacking, the tight
//! extremal expansion, and seeded random 4-connected and essentially
//! 4-connected triangulations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::embedding::{EmbeddingError, Triangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("parameter {got} too small, need at least {min}")]
    TooSmall { got: usize, min: usize },
    #[error("base triangulation is not 4-connected")]
    NotFourConnected,
    #[error("no instance found within {budget} attempts")]
    Unsatisfiable { budget: usize },
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Knobs for the random generators.
#[derive(Clone, Copy, Debug)]
pub struct RandomConfig {
    /// Flip attempts per vertex in the random walk.
    pub flips_per_vertex: usize,
    /// Attempts before a rejection loop gives up.
    pub retry_budget: usize,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig { flips_per_vertex: 10, retry_budget: 1000 }
    }
}

/// Cycle `0..r` plus inner apex `r` and outer apex `r + 1`.
pub fn double_wheel(r: usize) -> Result<Triangulation, GenError> {
    if r < 4 {
        return Err(GenError::TooSmall { got: r, min: 4 });
    }
    let (top, bottom) = (r, r + 1);
    let mut rot: Vec<Vec<usize>> = (0..r).map(|i| vec![bottom, (i + 1) % r, top, (i + r - 1) % r]).collect();
    rot.push((0..r).collect());
    rot.push((0..r).rev().collect());
    Ok(Triangulation::from_rotation(rot)?)
}

/// Inserts a degree-3 vertex (id `n`) into the face with vertex set `face`.
pub fn stack_vertex(t: &Triangulation, face: [usize; 3]) -> Result<Triangulation, GenError> {
    Ok(t.stack(face)?)
}

/// Stacks a vertex into every face of a 4-connected triangulation on
/// `n' >= 6` vertices. Inserted vertices get ids `n'..3n'-4`, one per face
/// in the base's face order.
pub fn extremal_expand(base: &Triangulation) -> Result<Triangulation, GenError> {
    if base.n() < 6 {
        return Err(GenError::TooSmall { got: base.n(), min: 6 });
    }
    if !base.is_4_connected() {
        return Err(GenError::NotFourConnected);
    }
    let faces: Vec<[usize; 3]> = base.faces().iter().map(|f| [f[0], f[1], f[2]]).collect();
    let mut t = base.clone();
    for f in faces {
        t = t.stack(f)?;
    }
    Ok(t)
}

/// Flips the edge `uv` of a triangulation. Returns the new rotation
/// system, or `None` when the flip would create a multi-edge or a vertex of
/// degree below 3.
fn try_flip(t: &Triangulation, u: usize, v: usize) -> Option<Vec<Vec<usize>>> {
    let f1 = &t.faces()[t.face_of_dart(u, v)?];
    let f2 = &t.faces()[t.face_of_dart(v, u)?];
    let a = *f1.iter().find(|&&w| w != u && w != v)?;
    let b = *f2.iter().find(|&&w| w != u && w != v)?;
    if a == b || t.has_edge(a, b) || t.degree(u) <= 3 || t.degree(v) <= 3 {
        return None;
    }
    let mut rot = t.rotations().to_vec();
    rot[u].retain(|&w| w != v);
    rot[v].retain(|&w| w != u);
    // face u->v->a: in rot[a], u immediately precedes v; b goes between them
    let pa = rot[a].iter().position(|&w| w == u)?;
    rot[a].insert(pa + 1, b);
    // face v->u->b: in rot[b], v immediately precedes u; a goes between them
    let pb = rot[b].iter().position(|&w| w == v)?;
    rot[b].insert(pb + 1, a);
    Some(rot)
}

/// Number of separating triangles: every edge lies in two facial
/// triangles, and each separating triangle is seen from its three edges.
fn separating_triangle_count(t: &Triangulation) -> usize {
    let extra: usize =
        t.edges().into_iter().map(|(u, v)| t.rotation(u).iter().filter(|&&w| t.has_edge(v, w)).count() - 2).sum();
    extra / 3
}

/// Acceptance probability for a flip that adds one separating triangle.
const SEPARATING_PENALTY: f64 = 0.2;

/// A 4-connected triangulation on `n` vertices from a random walk of
/// diagonal flips started at the double wheel. The walk is weighted
/// against separating triangles and, after `flips_per_vertex * n` steps,
/// continues until it reaches a state without any. Deterministic per seed;
/// uniformity is not claimed.
pub fn random_4connected_triangulation(n: usize, seed: u64) -> Result<Triangulation, GenError> {
    random_4connected_with(n, seed, RandomConfig::default())
}

pub fn random_4connected_with(n: usize, seed: u64, cfg: RandomConfig) -> Result<Triangulation, GenError> {
    if n < 6 {
        return Err(GenError::TooSmall { got: n, min: 6 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = double_wheel(n - 2)?;
    let mut t = start.clone();
    let mut sep = 0;
    let mut steps = 0;
    let burn_in = cfg.flips_per_vertex * n;
    // the double wheel is always a valid fallback, so a walk that runs out
    // of budget restarts from it
    let budget = burn_in + cfg.retry_budget * n;
    loop {
        if steps >= burn_in && sep == 0 {
            return Ok(t);
        }
        if steps >= budget {
            t = start.clone();
            sep = 0;
            steps = 0;
            continue;
        }
        steps += 1;
        let edges = t.edges();
        let (u, v) = edges[rng.gen_range(0..edges.len())];
        let Some(rot) = try_flip(&t, u, v) else { continue };
        let next = Triangulation::from_rotation(rot).expect("flip keeps a triangulation");
        let next_sep = separating_triangle_count(&next);
        let accept = next_sep <= sep || rng.gen_bool(SEPARATING_PENALTY.powi((next_sep - sep) as i32));
        if accept {
            t = next;
            sep = next_sep;
        }
    }
}

/// An essentially 4-connected triangulation on `n` vertices: a random
/// 4-connected base on `n'` vertices with `n - n'` degree-3 vertices
/// stacked into distinct random faces, checked with the trivial-cut test.
pub fn random_essentially_4connected_triangulation(n: usize, seed: u64) -> Result<Triangulation, GenError> {
    random_essentially_4connected_with(n, seed, RandomConfig::default())
}

pub fn random_essentially_4connected_with(n: usize, seed: u64, cfg: RandomConfig) -> Result<Triangulation, GenError> {
    if n < 6 {
        return Err(GenError::TooSmall { got: n, min: 6 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // the base needs at least (n + 4) / 3 vertices to host n - n' stackings
    let lo = 6.max((n + 4).div_ceil(3));
    for _ in 0..cfg.retry_budget {
        let base_n = rng.gen_range(lo..=n);
        let base_seed: u64 = rng.gen();
        let base = random_4connected_with(base_n, base_seed, cfg)?;
        let mut faces: Vec<[usize; 3]> = base.faces().iter().map(|f| [f[0], f[1], f[2]]).collect();
        faces.shuffle(&mut rng);
        let mut t = base;
        for f in faces.into_iter().take(n - base_n) {
            t = t.stack(f)?;
        }
        if t.is_essentially_4_connected() {
            return Ok(t);
        }
    }
    Err(GenError::Unsatisfiable { budget: cfg.retry_budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::{is_essentially_4_connected, separating_triangles};
    use crate::embedding::delete_independent_deg3;
    use crate::embedding::fixtures::k4;

    #[test]
    fn double_wheel_four_is_octahedron() {
        let t = double_wheel(4).unwrap();
        assert_eq!(t.n(), 6);
        assert!((0..6).all(|v| t.degree(v) == 4));
        assert!(t.is_4_connected());
    }

    #[test]
    fn double_wheel_shapes() {
        for r in 4..12 {
            let t = double_wheel(r).unwrap();
            assert_eq!(t.n(), r + 2);
            assert_eq!(t.m(), 3 * t.n() - 6);
            assert_eq!(t.faces().len(), 2 * t.n() - 4);
            assert!(t.is_maximal_planar());
        }
        assert!(separating_triangles(&double_wheel(6).unwrap()).is_empty());
        assert_eq!(double_wheel(3), Err(GenError::TooSmall { got: 3, min: 4 }));
    }

    #[test]
    fn stacking_k4() {
        let t = k4();
        let f = t.faces()[0].clone();
        let s = stack_vertex(&t, [f[0], f[1], f[2]]).unwrap();
        assert_eq!(s.n(), 5);
        assert_eq!(s.degree(4), 3);
        assert!(s.is_maximal_planar());
        assert!(matches!(stack_vertex(&t, [0, 1, 4]), Err(GenError::Embedding(EmbeddingError::NotAFace(_)))));
    }

    #[test]
    fn stacking_octahedron_once() {
        let t = double_wheel(4).unwrap();
        let f = t.faces()[5].clone();
        let s = stack_vertex(&t, [f[0], f[1], f[2]]).unwrap();
        assert_eq!(separating_triangles(&s).len(), 1);
    }

    #[test]
    fn extremal_sizes() {
        for r in 4..=6 {
            let base = double_wheel(r).unwrap();
            let g = extremal_expand(&base).unwrap();
            let np = base.n();
            assert_eq!(g.n(), 3 * np - 4);
            assert_eq!(g.faces().len(), 2 * (3 * np - 4) - 4);
            let tri = separating_triangles(&g);
            assert_eq!(tri.len(), 2 * np - 4);
            assert!(tri.iter().all(|c| c.trivial));
            assert!(g.is_essentially_4_connected());
            let inserted: Vec<usize> = (np..g.n()).collect();
            assert!(inserted.iter().all(|&x| g.degree(x) == 3));
            let d = delete_independent_deg3(&g, &inserted).unwrap();
            assert_eq!(d.result, base);
            assert_eq!(d.nonempty_faces().len(), base.faces().len());
        }
    }

    #[test]
    fn extremal_rejects_non_4_connected() {
        let t = double_wheel(4).unwrap();
        let f = t.faces()[0].clone();
        let s = t.stack([f[0], f[1], f[2]]).unwrap();
        assert_eq!(extremal_expand(&s), Err(GenError::NotFourConnected));
        assert_eq!(extremal_expand(&k4()), Err(GenError::TooSmall { got: 4, min: 6 }));
    }

    #[test]
    fn random_4c_six_is_octahedron() {
        for seed in 0..5 {
            let t = random_4connected_triangulation(6, seed).unwrap();
            assert!(t.is_isomorphic(&double_wheel(4).unwrap()));
        }
    }

    #[test]
    fn random_4c_properties() {
        for n in 7..14 {
            for seed in 0..4 {
                let t = random_4connected_triangulation(n, seed).unwrap();
                assert_eq!(t.n(), n);
                assert!(separating_triangles(&t).is_empty());
                assert!(t.is_4_connected());
            }
        }
        let a = random_4connected_triangulation(9, 1).unwrap();
        let b = random_4connected_triangulation(9, 1).unwrap();
        assert_eq!(a.to_rot_string(), b.to_rot_string());
    }

    #[test]
    fn random_walk_moves_away_from_the_double_wheel() {
        let distinct = (0..10)
            .map(|s| random_4connected_triangulation(12, s).unwrap().to_rot_string())
            .collect::<std::collections::HashSet<_>>();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn random_e4c_properties() {
        let t = random_essentially_4connected_triangulation(6, 3).unwrap();
        assert!(t.is_isomorphic(&double_wheel(4).unwrap()));
        for n in [7, 10, 12, 14] {
            for seed in 0..3 {
                let t = random_essentially_4connected_triangulation(n, seed).unwrap();
                assert_eq!(t.n(), n);
                assert!(is_essentially_4_connected(&t).unwrap());
            }
        }
        let a = random_essentially_4connected_triangulation(12, 7).unwrap();
        let b = random_essentially_4connected_triangulation(12, 7).unwrap();
        assert_eq!(a.to_rot_string(), b.to_rot_string());
    }
}
