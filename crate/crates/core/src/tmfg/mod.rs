//! Triangular Maximally Filtered Graph construction.
//!
//! Three builders produce the same [`TmfgGraph`] representation:
//!
//! * [`build_tmfg_exact`]: the prefix baseline. Every round scans all
//!   uninserted vertices for every live face and inserts the `p` best
//!   face-vertex pairs.
//! * [`build_tmfg_corr`]: candidates for a face come only from the most
//!   similar uninserted neighbor of each of its three corners, read off
//!   pre-sorted neighbor lists. Gains live in an array indexed by face.
//! * [`build_tmfg_heap`]: same candidate rule, but gains sit in a max-heap and
//!   a stale entry is only recomputed when it reaches the top.
//!
//! All three break ties by (gain desc, face id asc, vertex id asc), where a
//! face id is its creation index, so output never depends on worker count.

mod corr;
mod exact;
mod heap;
mod io;
mod state;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simmatrix::{SimilarityMatrix, SortedNeighborLists};

pub use corr::build_tmfg_corr;
pub use exact::build_tmfg_exact;
pub use heap::build_tmfg_heap;
pub use io::{read_edge_list, read_trace, write_edge_list, write_trace};
pub use state::{gain, FaceId, GainEntry, TmfgState};

/// Which construction algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Exact,
    Corr,
    Heap,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Exact => "exact",
            Variant::Corr => "corr",
            Variant::Heap => "heap",
        }
    }

    /// Whether the builder consumes pre-sorted neighbor lists.
    pub fn needs_sorted_lists(self) -> bool {
        !matches!(self, Variant::Exact)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Variant::Exact),
            "corr" => Ok(Variant::Corr),
            "heap" => Ok(Variant::Heap),
            other => Err(Error::Config(format!(
                "unknown TMFG variant `{other}` (expected exact, corr or heap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildConfig {
    pub variant: Variant,
    /// Face-vertex pairs inserted per round. Ignored by the heap builder.
    pub prefix_size: usize,
    /// Cross-check every candidate against brute force while building.
    /// Quadratic extra work per step; meant for tests.
    #[serde(default)]
    pub oracle_checks: bool,
}

impl BuildConfig {
    pub fn new(variant: Variant, prefix_size: usize) -> Result<Self> {
        if prefix_size == 0 {
            return Err(Error::Config("prefix size must be at least 1".into()));
        }
        Ok(Self {
            variant,
            prefix_size,
            oracle_checks: false,
        })
    }

    pub fn exact(prefix_size: usize) -> Self {
        Self::new(Variant::Exact, prefix_size).expect("prefix size must be at least 1")
    }

    pub fn corr(prefix_size: usize) -> Self {
        Self::new(Variant::Corr, prefix_size).expect("prefix size must be at least 1")
    }

    pub fn heap() -> Self {
        Self::new(Variant::Heap, 1).expect("valid")
    }

    pub fn with_oracle_checks(mut self) -> Self {
        self.oracle_checks = true;
        self
    }
}

/// A weighted TMFG edge with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: u32,
    pub b: u32,
    pub weight: f64,
}

impl Edge {
    pub(crate) fn new(x: u32, y: u32, s: &SimilarityMatrix) -> Self {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        Self {
            a,
            b,
            weight: s.get(a as usize, b as usize),
        }
    }
}

/// One step of the insertion trace: `vertex` was joined to the corners of
/// `face` (ascending ids).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Insertion {
    pub vertex: u32,
    pub face: [u32; 3],
}

/// A finished TMFG: its edges, final faces and the insertion trace that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct TmfgGraph {
    pub(crate) n: usize,
    pub(crate) clique: [u32; 4],
    pub(crate) insertions: Vec<Insertion>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) faces: Vec<[u32; 3]>,
}

impl TmfgGraph {
    /// Rebuilds a graph from its initial clique and trace, checking that every
    /// host face was live when used.
    pub fn from_trace(
        n: usize,
        clique: [u32; 4],
        insertions: Vec<Insertion>,
        s: Option<&SimilarityMatrix>,
    ) -> Result<Self> {
        let replay = Replay::run(n, clique, &insertions)?;
        let edges = replay
            .edges
            .iter()
            .map(|&(a, b)| Edge {
                a,
                b,
                weight: s.map_or(f64::NAN, |s| s.get(a as usize, b as usize)),
            })
            .collect();
        Ok(Self {
            n,
            clique,
            insertions,
            edges,
            faces: replay.live_faces(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Initial 4-clique, ascending.
    pub fn clique(&self) -> [u32; 4] {
        self.clique
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }

    /// Edges in insertion order: the six clique edges, then three per
    /// inserted vertex.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Live faces at the end of construction, in creation order.
    pub fn faces(&self) -> &[[u32; 3]] {
        &self.faces
    }

    /// Sum of the stored edge weights.
    pub fn weight_sum(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Adjacency lists (ascending neighbor ids).
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.a as usize].push(e.b);
            adj[e.b as usize].push(e.a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Replays the trace and checks it reproduces this graph's edges and
    /// faces exactly, plus the `3n - 6` / `2n - 4` counts.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.edges.len() != 3 * n - 6 {
            return Err(Error::TraceCorruption(format!(
                "{} edges, expected {}",
                self.edges.len(),
                3 * n - 6
            )));
        }
        if self.faces.len() != 2 * n - 4 {
            return Err(Error::TraceCorruption(format!(
                "{} faces, expected {}",
                self.faces.len(),
                2 * n - 4
            )));
        }
        let replay = Replay::run(n, self.clique, &self.insertions)?;
        let edges: Vec<(u32, u32)> = self.edges.iter().map(|e| (e.a, e.b)).collect();
        if edges != replay.edges {
            return Err(Error::TraceCorruption(
                "replayed edges differ from stored edges".into(),
            ));
        }
        if self.faces != replay.live_faces() {
            return Err(Error::TraceCorruption(
                "replayed faces differ from stored faces".into(),
            ));
        }
        Ok(())
    }
}

/// Trace replay: faces in creation order, which are still live, and which
/// bubble (0 for the clique, `k + 1` for insertion `k`) created each face.
#[derive(Debug, Clone)]
pub(crate) struct Replay {
    pub faces: Vec<[u32; 3]>,
    pub alive: Vec<bool>,
    pub creator: Vec<usize>,
    /// Face consumed by insertion `k`.
    pub host: Vec<FaceId>,
    pub edges: Vec<(u32, u32)>,
}

impl Replay {
    pub fn run(n: usize, clique: [u32; 4], insertions: &[Insertion]) -> Result<Self> {
        if n < 4 {
            return Err(Error::DatasetTooSmall { n });
        }
        if insertions.len() != n - 4 {
            return Err(Error::TraceCorruption(format!(
                "{} insertions for {n} vertices",
                insertions.len()
            )));
        }
        let mut seen = vec![false; n];
        let mut mark = |v: u32| -> Result<()> {
            let slot = seen
                .get_mut(v as usize)
                .ok_or_else(|| Error::TraceCorruption(format!("vertex {v} out of range")))?;
            if std::mem::replace(slot, true) {
                return Err(Error::TraceCorruption(format!("vertex {v} inserted twice")));
            }
            Ok(())
        };
        let mut sorted_clique = clique;
        sorted_clique.sort_unstable();
        if sorted_clique != clique {
            return Err(Error::TraceCorruption("clique ids must be ascending".into()));
        }
        for v in clique {
            mark(v)?;
        }
        let [a, b, c, d] = clique;
        let mut faces = vec![[a, b, c], [a, b, d], [a, c, d], [b, c, d]];
        let mut alive = vec![true; 4];
        let mut creator = vec![0; 4];
        let mut index: HashMap<[u32; 3], FaceId> =
            faces.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut edges = Vec::with_capacity(3 * n - 6);
        for (i, &x) in clique.iter().enumerate() {
            for &y in &clique[i + 1..] {
                edges.push((x, y));
            }
        }
        let mut host = Vec::with_capacity(insertions.len());
        for (k, ins) in insertions.iter().enumerate() {
            let [x, y, z] = ins.face;
            if !(x < y && y < z) {
                return Err(Error::TraceCorruption(format!(
                    "insertion {k}: face {:?} is not ascending",
                    ins.face
                )));
            }
            let f = index.remove(&ins.face).ok_or_else(|| {
                Error::TraceCorruption(format!(
                    "insertion {k}: face {:?} was never live",
                    ins.face
                ))
            })?;
            mark(ins.vertex)?;
            let v = ins.vertex;
            alive[f] = false;
            host.push(f);
            for w in [x, y, z] {
                edges.push((v.min(w), v.max(w)));
            }
            for face in [
                state::sorted3(v, x, y),
                state::sorted3(v, y, z),
                state::sorted3(v, x, z),
            ] {
                index.insert(face, faces.len());
                faces.push(face);
                alive.push(true);
                creator.push(k + 1);
            }
        }
        Ok(Self {
            faces,
            alive,
            creator,
            host,
            edges,
        })
    }

    pub fn live_faces(&self) -> Vec<[u32; 3]> {
        self.faces
            .iter()
            .zip(&self.alive)
            .filter_map(|(f, &a)| a.then_some(*f))
            .collect()
    }
}

/// The four vertices with the largest off-diagonal row sums (ties to lower
/// ids), ascending.
pub fn select_initial_clique(s: &SimilarityMatrix) -> [u32; 4] {
    let n = s.size();
    let sums: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            s.row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, x)| x)
                .sum()
        })
        .collect();
    let mut order: Vec<u32> = (0..n as u32).collect();
    let top = |a: &u32, b: &u32| {
        sums[*b as usize]
            .total_cmp(&sums[*a as usize])
            .then(a.cmp(b))
    };
    order.select_nth_unstable_by(3, top);
    let mut clique = [order[0], order[1], order[2], order[3]];
    clique.sort_unstable();
    clique
}

/// Sum of `S[i][j]` over the graph's edges.
pub fn edge_sum(graph: &TmfgGraph, s: &SimilarityMatrix) -> f64 {
    graph
        .edges
        .iter()
        .map(|e| s.get(e.a as usize, e.b as usize))
        .sum()
}

/// Counters gathered while building.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    /// Insertion rounds (equals inserted vertices for `p = 1`).
    pub rounds: usize,
    /// Heap pops, fresh and stale.
    pub pops: usize,
    /// Stale entries recomputed and re-pushed.
    pub refreshes: usize,
    /// Refreshes whose new gain exceeded the old one.
    pub gain_increases: usize,
    /// Oracle mode only: refreshes where both old and new candidate were the
    /// exhaustive best and the gain still went up. Always 0 if correct.
    pub monotonicity_violations: usize,
}

/// A built graph with stage timings.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub graph: TmfgGraph,
    pub stats: BuildStats,
    /// Selecting the initial clique.
    pub initial_faces: Duration,
    /// Everything after the clique: initial gains and all insertions.
    pub insertion: Duration,
}

/// Runs the builder named by `config.variant`. `lists` is required for the
/// corr and heap variants.
pub fn build(
    s: &SimilarityMatrix,
    lists: Option<&SortedNeighborLists>,
    config: &BuildConfig,
) -> Result<BuildOutput> {
    if config.prefix_size == 0 {
        return Err(Error::Config("prefix size must be at least 1".into()));
    }
    let need_lists = || {
        lists.ok_or_else(|| {
            Error::Config(format!(
                "the {} builder needs sorted neighbor lists",
                config.variant
            ))
        })
    };
    match config.variant {
        Variant::Exact => Ok(exact::run(s, config)),
        Variant::Corr => Ok(corr::run(s, need_lists()?, config)),
        Variant::Heap => Ok(heap::run(s, need_lists()?, config)),
    }
}

pub(crate) struct Clock {
    start: Instant,
}

impl Clock {
    pub fn start() -> Self {
        Self {
            start: Instant::now(),
        }
    }

    pub fn lap(&mut self) -> Duration {
        let now = Instant::now();
        let d = now - self.start;
        self.start = now;
        d
    }
}
