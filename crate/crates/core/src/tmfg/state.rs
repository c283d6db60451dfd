use std::cmp::Ordering;

use crate::simmatrix::{SimilarityMatrix, SortedNeighborLists};

use super::{Edge, Insertion, TmfgGraph};

/// Dense face handle, assigned in creation order.
pub type FaceId = usize;

/// A face-vertex pair and its gain.
///
/// `Ord` ranks entries by preference: higher gain first, then lower face id,
/// then lower vertex id. The greatest entry is the one to insert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEntry {
    pub face: FaceId,
    pub vertex: u32,
    pub gain: f64,
}

impl Eq for GainEntry {}

impl PartialOrd for GainEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GainEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.face.cmp(&self.face))
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Sum of similarities between `v` and the three corners of `face`.
///
/// Terms are added in ascending corner order, so the value is reproducible
/// bit for bit from the matrix alone.
#[inline]
pub fn gain(face: [u32; 3], v: u32, s: &SimilarityMatrix) -> f64 {
    let row = s.row(v as usize);
    row[face[0] as usize] + row[face[1] as usize] + row[face[2] as usize]
}

/// Best vertex among `candidates` for `face` (ties to the lower id).
pub(crate) fn best_candidate(
    s: &SimilarityMatrix,
    face_id: FaceId,
    face: [u32; 3],
    candidates: impl IntoIterator<Item = u32>,
) -> Option<GainEntry> {
    candidates
        .into_iter()
        .map(|u| GainEntry {
            face: face_id,
            vertex: u,
            gain: gain(face, u, s),
        })
        .max()
}

/// Exhaustive best uninserted vertex for `face`, scanning `remaining`
/// (ascending ids).
pub(crate) fn exact_best(
    s: &SimilarityMatrix,
    face_id: FaceId,
    face: [u32; 3],
    remaining: &[u32],
) -> Option<GainEntry> {
    let ra = s.row(face[0] as usize);
    let rb = s.row(face[1] as usize);
    let rc = s.row(face[2] as usize);
    let mut best: Option<(f64, u32)> = None;
    for &u in remaining {
        let ui = u as usize;
        let g = ra[ui] + rb[ui] + rc[ui];
        match best {
            Some((bg, _)) if g <= bg => {}
            _ => best = Some((g, u)),
        }
    }
    best.map(|(gain, vertex)| GainEntry {
        face: face_id,
        vertex,
        gain,
    })
}

pub(crate) fn sorted3(a: u32, b: u32, c: u32) -> [u32; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

/// The growing graph shared by all builders: faces, the inserted set,
/// per-vertex cursors into the sorted neighbor lists, and the trace.
#[derive(Debug, Clone)]
pub struct TmfgState {
    n: usize,
    clique: [u32; 4],
    faces: Vec<[u32; 3]>,
    alive: Vec<bool>,
    live_count: usize,
    inserted: Vec<bool>,
    remaining: usize,
    cursors: Vec<u32>,
    edges: Vec<Edge>,
    insertions: Vec<Insertion>,
}

impl TmfgState {
    /// Starts from the 4-clique `clique` (ascending ids) and its four faces.
    pub fn new(s: &SimilarityMatrix, clique: [u32; 4]) -> Self {
        let n = s.size();
        let [a, b, c, d] = clique;
        let mut inserted = vec![false; n];
        for v in clique {
            inserted[v as usize] = true;
        }
        let mut edges = Vec::with_capacity(3 * n - 6);
        for (i, &x) in clique.iter().enumerate() {
            for &y in &clique[i + 1..] {
                edges.push(Edge::new(x, y, s));
            }
        }
        let faces = vec![[a, b, c], [a, b, d], [a, c, d], [b, c, d]];
        Self {
            n,
            clique,
            alive: vec![true; 4],
            live_count: 4,
            faces,
            inserted,
            remaining: n - 4,
            cursors: vec![0; n],
            edges,
            insertions: Vec::with_capacity(n - 4),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn remaining(&self) -> usize {
        self.remaining
    }

    #[inline]
    pub fn is_inserted(&self, v: u32) -> bool {
        self.inserted[v as usize]
    }

    pub fn inserted_mask(&self) -> &[bool] {
        &self.inserted
    }

    #[inline]
    pub fn face(&self, f: FaceId) -> [u32; 3] {
        self.faces[f]
    }

    #[inline]
    pub fn is_live(&self, f: FaceId) -> bool {
        self.alive[f]
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn live_count(&self) -> usize {
        self.live_count
    }

    pub fn live_faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter_map(|(f, &a)| a.then_some(f))
    }

    /// Uninserted vertices in ascending order.
    pub fn remaining_vertices(&self) -> Vec<u32> {
        (0..self.n as u32)
            .filter(|&v| !self.inserted[v as usize])
            .collect()
    }

    /// Marks `v` as inserted without touching faces. Used by prefix rounds,
    /// which remove every selected vertex before subdividing any face.
    pub(crate) fn mark_inserted(&mut self, v: u32) {
        debug_assert!(!self.inserted[v as usize]);
        self.inserted[v as usize] = true;
        self.remaining -= 1;
    }

    /// Connects `v` to the corners of live face `f`, replacing `f` by three
    /// new faces whose ids are returned. `v` must already be marked inserted.
    pub(crate) fn subdivide(&mut self, v: u32, f: FaceId, s: &SimilarityMatrix) -> [FaceId; 3] {
        debug_assert!(self.alive[f], "face {f} is not live");
        debug_assert!(self.inserted[v as usize]);
        let [x, y, z] = self.faces[f];
        self.alive[f] = false;
        for w in [x, y, z] {
            self.edges.push(Edge::new(v, w, s));
        }
        self.insertions.push(Insertion {
            vertex: v,
            face: [x, y, z],
        });
        let base = self.faces.len();
        self.faces.push(sorted3(v, x, y));
        self.faces.push(sorted3(v, y, z));
        self.faces.push(sorted3(v, x, z));
        self.alive.extend_from_slice(&[true; 3]);
        self.live_count += 2;
        [base, base + 1, base + 2]
    }

    /// Inserts `v` into face `f` in one step.
    pub fn insert(&mut self, v: u32, f: FaceId, s: &SimilarityMatrix) -> [FaceId; 3] {
        self.mark_inserted(v);
        self.subdivide(v, f, s)
    }

    /// Moves `v`'s cursor forward past inserted neighbors and returns the most
    /// similar uninserted vertex, or `None` once every vertex is inserted.
    ///
    /// The cursor never moves backward, so all refreshes of one vertex over a
    /// whole build scan its list at most once.
    pub fn refresh_max_corr(&mut self, v: u32, lists: &SortedNeighborLists) -> Option<u32> {
        let pos = self.advance(v, lists);
        self.cursors[v as usize] = pos as u32;
        lists.list(v as usize).get(pos).copied()
    }

    fn advance(&self, v: u32, lists: &SortedNeighborLists) -> usize {
        let list = lists.list(v as usize);
        let mut pos = self.cursors[v as usize] as usize;
        while pos < list.len() && self.inserted[list[pos] as usize] {
            pos += 1;
        }
        pos
    }

    /// Refreshes many cursors, in parallel when the batch is large.
    pub(crate) fn refresh_many(&mut self, vertices: &[u32], lists: &SortedNeighborLists) {
        use rayon::prelude::*;
        if vertices.len() >= 256 {
            let positions: Vec<usize> = vertices
                .par_iter()
                .map(|&v| self.advance(v, lists))
                .collect();
            for (&v, pos) in vertices.iter().zip(positions) {
                self.cursors[v as usize] = pos as u32;
            }
        } else {
            for &v in vertices {
                self.refresh_max_corr(v, lists);
            }
        }
    }

    /// Current cursor target of `v` without advancing; fresh only right after
    /// a refresh.
    #[inline]
    pub fn max_corr(&self, v: u32, lists: &SortedNeighborLists) -> Option<u32> {
        lists
            .list(v as usize)
            .get(self.cursors[v as usize] as usize)
            .copied()
    }

    /// Best entry for face `f` among the current max-corr targets of its
    /// corners. Callers refresh the corners first.
    pub(crate) fn corr_candidate(
        &self,
        f: FaceId,
        s: &SimilarityMatrix,
        lists: &SortedNeighborLists,
    ) -> Option<GainEntry> {
        let face = self.faces[f];
        best_candidate(
            s,
            f,
            face,
            face.iter().filter_map(|&w| self.max_corr(w, lists)),
        )
    }

    /// Brute-force most similar uninserted vertex to `v` (ties to lower id).
    pub fn brute_force_max_corr(&self, v: u32, s: &SimilarityMatrix) -> Option<u32> {
        let row = s.row(v as usize);
        let mut best: Option<(f64, u32)> = None;
        for u in 0..self.n as u32 {
            if u == v || self.inserted[u as usize] {
                continue;
            }
            let x = row[u as usize];
            if best.is_none_or(|(b, _)| x > b) {
                best = Some((x, u));
            }
        }
        best.map(|(_, u)| u)
    }

    /// Brute-force best entry for face `f` over every uninserted vertex.
    pub fn brute_force_best(&self, f: FaceId, s: &SimilarityMatrix) -> Option<GainEntry> {
        exact_best(s, f, self.faces[f], &self.remaining_vertices())
    }

    pub(crate) fn finish(self) -> TmfgGraph {
        debug_assert_eq!(self.remaining, 0);
        let faces = self
            .faces
            .iter()
            .zip(&self.alive)
            .filter_map(|(f, &a)| a.then_some(*f))
            .collect();
        TmfgGraph {
            n: self.n,
            clique: self.clique,
            insertions: self.insertions,
            edges: self.edges,
            faces,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simmatrix::sort_neighbor_lists;

    fn toy(n: usize) -> SimilarityMatrix {
        SimilarityMatrix::from_fn(n, |i, j| (((i * 31 + j * 17) % 23) as f64 / 23.0) - 0.4).unwrap()
    }

    #[test]
    fn gain_is_three_term_sum() {
        let s = SimilarityMatrix::from_fn(4, |i, j| match (i, j) {
            (0, 3) => 0.1,
            (1, 3) => 0.2,
            (2, 3) => 0.3,
            _ => 0.0,
        })
        .unwrap();
        assert!((gain([0, 1, 2], 3, &s) - 0.6).abs() < 1e-15);
        let ones = SimilarityMatrix::from_fn(4, |_, _| 1.0).unwrap();
        assert_eq!(gain([0, 1, 2], 3, &ones), 3.0);
    }

    #[test]
    fn entry_order_prefers_gain_then_low_ids() {
        let a = GainEntry { face: 3, vertex: 9, gain: 1.0 };
        let b = GainEntry { face: 2, vertex: 9, gain: 1.0 };
        let c = GainEntry { face: 2, vertex: 4, gain: 1.0 };
        let d = GainEntry { face: 0, vertex: 0, gain: 0.5 };
        assert!(b > a);
        assert!(c > b);
        assert!(a > d);
    }

    #[test]
    fn cursor_skips_inserted_prefix() {
        let n = 10;
        let s = toy(n);
        let lists = sort_neighbor_lists(&s);
        let mut st = TmfgState::new(&s, [0, 1, 2, 3]);
        let v = 5u32;
        let top: Vec<u32> = lists.list(5)[..4].to_vec();
        for &u in &top[..3] {
            if !st.is_inserted(u) {
                st.mark_inserted(u);
            }
        }
        let expected = top[3..]
            .iter()
            .chain(&lists.list(5)[4..])
            .copied()
            .find(|&u| !st.is_inserted(u));
        assert_eq!(st.refresh_max_corr(v, &lists), expected);
        assert_eq!(st.refresh_max_corr(v, &lists), st.brute_force_max_corr(v, &s));
    }

    #[test]
    fn last_remaining_vertex_is_returned() {
        let n = 8;
        let s = toy(n);
        let lists = sort_neighbor_lists(&s);
        let mut st = TmfgState::new(&s, [0, 1, 2, 3]);
        for u in 4..7 {
            st.mark_inserted(u);
        }
        for v in 0..7 {
            assert_eq!(st.refresh_max_corr(v, &lists), Some(7));
        }
        st.mark_inserted(7);
        assert_eq!(st.refresh_max_corr(0, &lists), None);
    }

    #[test]
    fn subdivide_replaces_one_face_with_three() {
        let s = toy(6);
        let mut st = TmfgState::new(&s, [0, 1, 2, 3]);
        let new = st.insert(4, 1, &s);
        assert_eq!(new, [4, 5, 6]);
        assert!(!st.is_live(1));
        assert_eq!(st.live_count(), 6);
        assert_eq!(st.face(4), [0, 1, 4]);
        assert_eq!(st.face(5), [1, 3, 4]);
        assert_eq!(st.face(6), [0, 3, 4]);
    }
}
