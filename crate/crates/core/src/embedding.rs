//! Combinatorial planar embeddings given as rotation systems.
//!
//! Every vertex stores the cyclic order of its neighbors, counterclockwise
//! when the graph is drawn in the plane. Faces are traced with the rule
//! `next(u -> v) = v -> w`, where `w` is the neighbor preceding `u` in the
//! rotation of `v`. Traced faces keep the face on their left, so bounded
//! faces of a plane drawing come out counterclockwise.
//!
//! A rotation system is accepted only if Euler's relation `n - m + f = 2`
//! holds for the traced faces; for a connected graph this is exactly the
//! statement that the rotation system describes an embedding in the sphere.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {v} lists neighbor {u} which is out of range")]
    VertexOutOfRange { v: usize, u: usize },
    #[error("vertex {v} has a loop")]
    Loop { v: usize },
    #[error("vertex {v} lists neighbor {u} more than once")]
    RepeatedNeighbor { v: usize, u: usize },
    #[error("inconsistent rotation: {u} lists {v} but {v} does not list {u}")]
    InconsistentRotation { u: usize, v: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("rotation system is not spherical: n - m + f = {euler}")]
    NotPlanarGenus { euler: i64 },
    #[error("face {face:?} is not a triangle")]
    NotTriangulation { face: Vec<usize> },
    #[error("vertices {u} and {v} of the deletion set are adjacent")]
    NotIndependent { u: usize, v: usize },
    #[error("vertex {v} has degree {degree}, expected 3")]
    WrongDegree { v: usize, degree: usize },
    #[error("{0:?} is not a face")]
    NotAFace(Vec<usize>),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A connected simple graph together with a spherical rotation system.
#[derive(Clone, PartialEq, Eq)]
pub struct Embedding {
    rot: Vec<Vec<usize>>,
    m: usize,
    faces: Vec<Vec<usize>>,
    // dart_face[v][i] is the face on the left of v -> rot[v][i]
    dart_face: Vec<Vec<usize>>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Embedding").field("n", &self.n()).field("m", &self.m).field("rot", &self.rot).finish()
    }
}

impl Embedding {
    /// Validates a rotation system and traces its faces.
    pub fn from_rotation(rot: Vec<Vec<usize>>) -> Result<Self, EmbeddingError> {
        let n = rot.len();
        if n == 0 {
            return Err(EmbeddingError::Empty);
        }
        let mut adj: Vec<HashSet<usize>> = vec![HashSet::new(); n];
        for (v, nbrs) in rot.iter().enumerate() {
            for &u in nbrs {
                if u >= n {
                    return Err(EmbeddingError::VertexOutOfRange { v, u });
                }
                if u == v {
                    return Err(EmbeddingError::Loop { v });
                }
                if !adj[v].insert(u) {
                    return Err(EmbeddingError::RepeatedNeighbor { v, u });
                }
            }
        }
        for v in 0..n {
            for &u in &rot[v] {
                if !adj[u].contains(&v) {
                    return Err(EmbeddingError::InconsistentRotation { u: v, v: u });
                }
            }
        }
        if !is_connected(&rot) {
            return Err(EmbeddingError::Disconnected);
        }
        let m = rot.iter().map(Vec::len).sum::<usize>() / 2;

        let (faces, dart_face) = trace_faces(&rot);
        let f = if n == 1 { 1 } else { faces.len() };
        let euler = n as i64 - m as i64 + f as i64;
        if euler != 2 {
            return Err(EmbeddingError::NotPlanarGenus { euler });
        }
        Ok(Embedding { rot, m, faces, dart_face })
    }

    pub fn n(&self) -> usize {
        self.rot.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Cyclic neighbor order of `v`.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rot
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rot[u].contains(&v)
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n() {
            let mut nb: Vec<usize> = self.rot[u].iter().copied().filter(|&v| v > u).collect();
            nb.sort_unstable();
            out.extend(nb.into_iter().map(|v| (u, v)));
        }
        out
    }

    /// Sorted neighbor list of `v`.
    pub fn sorted_neighbors(&self, v: usize) -> Vec<usize> {
        let mut nb = self.rot[v].clone();
        nb.sort_unstable();
        nb
    }

    /// Traced face boundaries, each a cyclic vertex sequence.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Face on the left of the dart `u -> v`.
    pub fn face_of_dart(&self, u: usize, v: usize) -> Option<usize> {
        let i = self.rot.get(u)?.iter().position(|&w| w == v)?;
        Some(self.dart_face[u][i])
    }

    /// Index of a traced face with exactly the given vertex set.
    pub fn find_face(&self, verts: &[usize]) -> Option<usize> {
        let mut key = verts.to_vec();
        key.sort_unstable();
        key.dedup();
        if key.len() != verts.len() {
            return None;
        }
        self.faces.iter().position(|f| {
            if f.len() != key.len() {
                return false;
            }
            let mut s = f.clone();
            s.sort_unstable();
            s == key
        })
    }

    pub fn is_face(&self, verts: &[usize]) -> bool {
        self.find_face(verts).is_some()
    }

    /// Whether the triangle `u v w` bounds a face, looked up via the two
    /// faces at the edge `uv`.
    pub fn is_triangle_face(&self, u: usize, v: usize, w: usize) -> bool {
        [(u, v), (v, u)].iter().any(|&(a, b)| {
            self.face_of_dart(a, b).map(|f| self.faces[f].len() == 3 && self.faces[f].contains(&w)).unwrap_or(false)
        })
    }

    /// True iff every traced face is a triangle.
    pub fn is_maximal_planar(&self) -> bool {
        self.n() >= 3 && self.faces.iter().all(|f| f.len() == 3)
    }

    /// Inserts a new vertex inside face `face` joined to all of its corners.
    /// The new vertex gets id `n`.
    pub fn insert_in_face(&self, face: usize) -> Result<Embedding, EmbeddingError> {
        let boundary = self.faces.get(face).ok_or_else(|| EmbeddingError::NotAFace(vec![]))?.clone();
        let set: HashSet<usize> = boundary.iter().copied().collect();
        if set.len() != boundary.len() {
            // a face visiting a vertex twice cannot take a simple star
            return Err(EmbeddingError::NotAFace(boundary));
        }
        let x = self.n();
        let len = boundary.len();
        let mut rot = self.rot.clone();
        for i in 0..len {
            let v = boundary[i];
            let succ = boundary[(i + 1) % len];
            // in rot[v] the face successor immediately precedes the face predecessor
            let p = rot[v].iter().position(|&w| w == succ).expect("face dart");
            rot[v].insert(p + 1, x);
        }
        rot.push(boundary);
        Embedding::from_rotation(rot)
    }

    /// Whether `self` and `other` are isomorphic as embedded graphs, with
    /// orientation-reversing isomorphisms allowed.
    pub fn is_isomorphic(&self, other: &Embedding) -> bool {
        if self.n() != other.n() || self.m != other.m {
            return false;
        }
        let mut deg_a: Vec<usize> = self.rot.iter().map(Vec::len).collect();
        let mut deg_b: Vec<usize> = other.rot.iter().map(Vec::len).collect();
        deg_a.sort_unstable();
        deg_b.sort_unstable();
        if deg_a != deg_b {
            return false;
        }
        let Some(&v0) = self.rot[0].first() else {
            return self.n() == 1;
        };
        (0..other.n()).any(|u| {
            other.rot[u].iter().any(|&v| {
                self.isomorphism_from((0, v0), other, (u, v), false).is_some()
                    || self.isomorphism_from((0, v0), other, (u, v), true).is_some()
            })
        })
    }

    /// Extends the dart correspondence `a -> b` to a vertex map, if possible.
    fn isomorphism_from(
        &self,
        a: (usize, usize),
        other: &Embedding,
        b: (usize, usize),
        mirror: bool,
    ) -> Option<Vec<usize>> {
        const UNSET: usize = usize::MAX;
        let n = self.n();
        let mut map = vec![UNSET; n];
        let mut used = vec![false; n];
        // anchor[v] is a dart (v, w) whose image is already fixed
        let mut queue = vec![(a, b)];
        map[a.0] = b.0;
        used[b.0] = true;
        let mut done = vec![false; n];
        while let Some(((x, xw), (y, yw))) = queue.pop() {
            if done[x] {
                continue;
            }
            done[x] = true;
            let (ra, rb) = (&self.rot[x], &other.rot[y]);
            if ra.len() != rb.len() {
                return None;
            }
            let d = ra.len();
            let ia = ra.iter().position(|&w| w == xw)?;
            let ib = rb.iter().position(|&w| w == yw)?;
            for s in 0..d {
                let p = ra[(ia + s) % d];
                let q = if mirror { rb[(ib + d - s) % d] } else { rb[(ib + s) % d] };
                if map[p] == UNSET {
                    if used[q] {
                        return None;
                    }
                    map[p] = q;
                    used[q] = true;
                } else if map[p] != q {
                    return None;
                }
                if !done[p] {
                    queue.push(((p, x), (q, y)));
                }
            }
        }
        Some(map)
    }

    /// Renders the "rot" interchange format.
    pub fn to_rot_string(&self) -> String {
        let mut s = format!("{} {}\n", self.n(), self.m);
        for (v, nb) in self.rot.iter().enumerate() {
            s.push_str(&v.to_string());
            s.push(':');
            for u in nb {
                s.push(' ');
                s.push_str(&u.to_string());
            }
            s.push('\n');
        }
        s
    }

    /// Parses the "rot" interchange format: a header `n m` followed by one
    /// line `v: u1 u2 ... ud` per vertex. `#` starts a comment.
    pub fn parse_rot(text: &str) -> Result<Embedding, EmbeddingError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(EmbeddingError::Parse { line: 0, msg: "missing header".into() })?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        let perr = |line: usize, msg: String| EmbeddingError::Parse { line, msg };
        if nums.len() != 2 {
            return Err(perr(hline, "header must be `n m`".into()));
        }
        let n: usize = nums[0].parse().map_err(|e| perr(hline, format!("bad n: {e}")))?;
        let m: usize = nums[1].parse().map_err(|e| perr(hline, format!("bad m: {e}")))?;
        let mut rot: Vec<Option<Vec<usize>>> = vec![None; n];
        for (ln, l) in lines {
            let (head, tail) = l.split_once(':').ok_or_else(|| perr(ln, "expected `v: neighbors`".into()))?;
            let v: usize = head.trim().parse().map_err(|e| perr(ln, format!("bad vertex id: {e}")))?;
            if v >= n {
                return Err(perr(ln, format!("vertex {v} out of range")));
            }
            if rot[v].is_some() {
                return Err(perr(ln, format!("vertex {v} listed twice")));
            }
            let nb = tail
                .split_whitespace()
                .map(|t| t.parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| perr(ln, format!("bad neighbor id: {e}")))?;
            rot[v] = Some(nb);
        }
        let rot = rot
            .into_iter()
            .enumerate()
            .map(|(v, r)| r.ok_or_else(|| perr(0, format!("vertex {v} has no rotation line"))))
            .collect::<Result<Vec<_>, _>>()?;
        let emb = Embedding::from_rotation(rot)?;
        if emb.m() != m {
            return Err(perr(hline, format!("header says m = {m}, rotation has {}", emb.m())));
        }
        Ok(emb)
    }
}

fn is_connected(rot: &[Vec<usize>]) -> bool {
    let n = rot.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &u in &rot[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == n
}

fn trace_faces(rot: &[Vec<usize>]) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    const UNSET: usize = usize::MAX;
    let mut dart_face: Vec<Vec<usize>> = rot.iter().map(|r| vec![UNSET; r.len()]).collect();
    let mut faces = Vec::new();
    let pos = |v: usize, u: usize| rot[v].iter().position(|&w| w == u).expect("symmetric");
    for v0 in 0..rot.len() {
        for i0 in 0..rot[v0].len() {
            if dart_face[v0][i0] != UNSET {
                continue;
            }
            let id = faces.len();
            let mut face = Vec::new();
            let (mut v, mut i) = (v0, i0);
            while dart_face[v][i] == UNSET {
                dart_face[v][i] = id;
                face.push(v);
                let w = rot[v][i];
                let d = rot[w].len();
                let j = (pos(w, v) + d - 1) % d;
                v = w;
                i = j;
            }
            faces.push(face);
        }
    }
    (faces, dart_face)
}

/// An embedding whose faces are all triangles.
#[derive(Clone, Debug)]
pub struct Triangulation {
    emb: Embedding,
    three_connected: OnceLock<bool>,
    four_connected: OnceLock<bool>,
    essentially_four_connected: OnceLock<bool>,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.emb == other.emb
    }
}

impl Eq for Triangulation {}

impl std::ops::Deref for Triangulation {
    type Target = Embedding;
    fn deref(&self) -> &Embedding {
        &self.emb
    }
}

impl Triangulation {
    pub fn new(emb: Embedding) -> Result<Self, EmbeddingError> {
        if let Some(f) = emb.faces().iter().find(|f| f.len() != 3) {
            return Err(EmbeddingError::NotTriangulation { face: f.clone() });
        }
        if emb.n() < 3 {
            return Err(EmbeddingError::NotTriangulation { face: vec![] });
        }
        Ok(Triangulation {
            emb,
            three_connected: OnceLock::new(),
            four_connected: OnceLock::new(),
            essentially_four_connected: OnceLock::new(),
        })
    }

    pub fn from_rotation(rot: Vec<Vec<usize>>) -> Result<Self, EmbeddingError> {
        Triangulation::new(Embedding::from_rotation(rot)?)
    }

    pub fn parse_rot(text: &str) -> Result<Self, EmbeddingError> {
        Triangulation::new(Embedding::parse_rot(text)?)
    }

    pub fn embedding(&self) -> &Embedding {
        &self.emb
    }

    pub fn into_embedding(self) -> Embedding {
        self.emb
    }

    pub fn is_3_connected(&self) -> bool {
        *self.three_connected.get_or_init(|| crate::connectivity::connectivity_at_least(&self.emb, 3))
    }

    pub fn is_4_connected(&self) -> bool {
        *self.four_connected.get_or_init(|| crate::connectivity::connectivity_at_least(&self.emb, 4))
    }

    /// Uses the separating-triangle characterization; `false` when not
    /// 3-connected.
    pub fn is_essentially_4_connected(&self) -> bool {
        *self.essentially_four_connected.get_or_init(|| {
            self.is_3_connected() && crate::connectivity::separating_triangles(self).iter().all(|c| c.trivial)
        })
    }

    /// Stacks a new degree-3 vertex (id `n`) into the face with vertex set `face`.
    pub fn stack(&self, face: [usize; 3]) -> Result<Triangulation, EmbeddingError> {
        let f = self.find_face(&face).ok_or_else(|| EmbeddingError::NotAFace(face.to_vec()))?;
        Triangulation::new(self.insert_in_face(f)?)
    }
}

/// Result of deleting an independent set of degree-3 vertices.
#[derive(Clone, Debug)]
pub struct Deletion {
    pub result: Triangulation,
    pub old_to_new: Vec<Option<usize>>,
    pub new_to_old: Vec<usize>,
    /// Per face of `result`: the deleted vertex (old id) that sat inside it.
    pub filled: Vec<Option<usize>>,
}

impl Deletion {
    /// A face is empty when it is also a face of the original triangulation.
    pub fn is_empty_face(&self, face: usize) -> bool {
        self.filled[face].is_none()
    }

    pub fn nonempty_faces(&self) -> Vec<usize> {
        (0..self.filled.len()).filter(|&f| self.filled[f].is_some()).collect()
    }
}

/// Deletes an independent set `set` of degree-3 vertices. Each deleted
/// vertex merges its three incident triangles into one; the surviving
/// vertices are re-indexed in increasing order of their old ids.
pub fn delete_independent_deg3(t: &Triangulation, set: &[usize]) -> Result<Deletion, EmbeddingError> {
    let n = t.n();
    let mut deleted = vec![false; n];
    for &x in set {
        if x >= n {
            return Err(EmbeddingError::VertexOutOfRange { v: x, u: x });
        }
        if t.degree(x) != 3 {
            return Err(EmbeddingError::WrongDegree { v: x, degree: t.degree(x) });
        }
        deleted[x] = true;
    }
    for &x in set {
        if let Some(&y) = t.rotation(x).iter().find(|&&y| deleted[y]) {
            return Err(EmbeddingError::NotIndependent { u: x, v: y });
        }
    }
    let mut old_to_new = vec![None; n];
    let mut new_to_old = Vec::with_capacity(n);
    for v in 0..n {
        if !deleted[v] {
            old_to_new[v] = Some(new_to_old.len());
            new_to_old.push(v);
        }
    }
    let rot: Vec<Vec<usize>> =
        new_to_old.iter().map(|&v| t.rotation(v).iter().filter_map(|&u| old_to_new[u]).collect()).collect();
    let result = Triangulation::from_rotation(rot)?;

    let mut filled = vec![None; result.faces().len()];
    for &x in set {
        let nb: Vec<usize> = t.rotation(x).iter().map(|&u| old_to_new[u].unwrap()).collect();
        // nb is counterclockwise around x, so the merged face lies left of nb[0] -> nb[1]
        let f = result.face_of_dart(nb[0], nb[1]).expect("merged face exists");
        filled[f] = Some(x);
    }
    Ok(Deletion { result, old_to_new, new_to_old, filled })
}
