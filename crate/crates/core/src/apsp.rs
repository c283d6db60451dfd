//! Shortest-path distances over a TMFG.
//!
//! Edge lengths come from similarities as `sqrt(2 (1 - s))`. [`apsp_exact`]
//! runs Dijkstra from every vertex; [`apsp_hub`] runs it from a few hub
//! vertices plus a bounded search around every vertex and answers the rest
//! through the hubs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simmatrix::{write_binary_matrix, SimilarityMatrix};
use crate::tmfg::TmfgGraph;

/// Metric length of an edge with similarity `s`.
#[inline]
pub fn edge_length(s: f64) -> f64 {
    (2.0 * (1.0 - s)).max(0.0).sqrt()
}

/// Undirected graph in compressed adjacency form.
#[derive(Debug, Clone)]
pub struct WeightedTmfg {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    lengths: Vec<f64>,
    strength: Vec<f64>,
}

impl WeightedTmfg {
    /// Builds from `(a, b, length)` edges. Strength (used to rank hubs) is
    /// the summed similarity implied by each length.
    pub fn from_lengths(n: usize, edges: &[(u32, u32, f64)]) -> Result<Self> {
        let mut strength = vec![0.0; n];
        let with_sim: Vec<(u32, u32, f64, f64)> = edges
            .iter()
            .map(|&(a, b, l)| (a, b, l, 1.0 - l * l / 2.0))
            .collect();
        for &(a, b, _, s) in &with_sim {
            if a as usize >= n || b as usize >= n {
                return Err(Error::InvalidInput(format!("edge ({a}, {b}) out of range")));
            }
            strength[a as usize] += s;
            strength[b as usize] += s;
        }
        Self::assemble(n, &with_sim, strength)
    }

    fn assemble(n: usize, edges: &[(u32, u32, f64, f64)], strength: Vec<f64>) -> Result<Self> {
        let mut degree = vec![0usize; n + 1];
        for &(a, b, l, _) in edges {
            if !(l >= 0.0) {
                return Err(Error::InvalidInput(format!("edge ({a}, {b}) has length {l}")));
            }
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for i in 0..n {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        let mut lengths = vec![0.0; offsets[n]];
        for &(a, b, l, _) in edges {
            for (x, y) in [(a, b), (b, a)] {
                let k = &mut fill[x as usize];
                targets[*k] = y;
                lengths[*k] = l;
                *k += 1;
            }
        }
        Ok(WeightedTmfg {
            offsets,
            targets,
            lengths,
            strength,
        })
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let r = self.offsets[v as usize]..self.offsets[v as usize + 1];
        self.targets[r.clone()]
            .iter()
            .copied()
            .zip(self.lengths[r].iter().copied())
    }

    /// Sum of edge similarities at `v`.
    pub fn strength(&self, v: u32) -> f64 {
        self.strength[v as usize]
    }
}

pub fn to_weighted(graph: &TmfgGraph, s: &SimilarityMatrix) -> WeightedTmfg {
    let n = graph.n();
    let mut strength = vec![0.0; n];
    let edges: Vec<(u32, u32, f64, f64)> = graph
        .edges()
        .iter()
        .map(|e| {
            let w = s.get(e.a as usize, e.b as usize);
            strength[e.a as usize] += w;
            strength[e.b as usize] += w;
            (e.a, e.b, edge_length(w), w)
        })
        .collect();
    WeightedTmfg::assemble(n, &edges, strength).expect("similarities lie in [-1, 1]")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApspMode {
    Exact,
    Hub,
}

impl fmt::Display for ApspMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ApspMode::Exact => "exact",
            ApspMode::Hub => "hub",
        })
    }
}

impl FromStr for ApspMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(ApspMode::Exact),
            "hub" => Ok(ApspMode::Hub),
            other => Err(Error::Config(format!(
                "unknown apsp mode `{other}` (expected exact or hub)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApspParams {
    pub hub_count: usize,
    pub radius_factor: f64,
}

pub const DEFAULT_RADIUS_FACTOR: f64 = 2.0;

impl ApspParams {
    /// `ceil(sqrt(n))` hubs and radius factor 2.
    pub fn default_for(n: usize) -> Self {
        ApspParams {
            hub_count: (n as f64).sqrt().ceil() as usize,
            radius_factor: DEFAULT_RADIUS_FACTOR,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.hub_count == 0 || self.hub_count > n {
            return Err(Error::Config(format!(
                "hub count {} must be in 1..={n}",
                self.hub_count
            )));
        }
        if !(self.radius_factor > 0.0 && self.radius_factor.is_finite()) {
            return Err(Error::Config(format!(
                "radius factor {} must be positive",
                self.radius_factor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Item {
    dist: f64,
    v: u32,
}

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `src` into `dist` (all `INFINITY` on entry), settling only
/// vertices within `limit`. Calls `settle` once per settled vertex and
/// returns the vertices whose `dist` entry was written.
fn dijkstra(
    g: &WeightedTmfg,
    src: u32,
    limit: f64,
    dist: &mut [f64],
    heap: &mut BinaryHeap<Item>,
    mut settle: impl FnMut(u32, f64),
) -> Vec<u32> {
    let mut touched = vec![src];
    heap.clear();
    dist[src as usize] = 0.0;
    heap.push(Item { dist: 0.0, v: src });
    while let Some(Item { dist: d, v }) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        if d > limit {
            break;
        }
        settle(v, d);
        for (u, l) in g.neighbors(v) {
            let nd = d + l;
            let slot = &mut dist[u as usize];
            if nd < *slot {
                if slot.is_infinite() {
                    touched.push(u);
                }
                *slot = nd;
                heap.push(Item { dist: nd, v: u });
            }
        }
    }
    touched
}

fn full_row(g: &WeightedTmfg, src: u32, row: &mut [f64]) {
    row.fill(f64::INFINITY);
    let mut heap = BinaryHeap::new();
    dijkstra(g, src, f64::INFINITY, row, &mut heap, |_, _| {});
}

/// Dense distance matrix from one Dijkstra per source, symmetrized by taking
/// the smaller of the two directions.
#[derive(Debug, Clone)]
pub struct ExactDistances {
    n: usize,
    d: Vec<f64>,
}

impl ExactDistances {
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.d[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.d[u * self.n..(u + 1) * self.n]
    }
}

pub fn apsp_exact(g: &WeightedTmfg) -> DistanceOracle {
    let n = g.n();
    let mut d = vec![0.0; n * n];
    d.par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(src, row)| full_row(g, src as u32, row));
    for i in 0..n {
        for j in i + 1..n {
            let m = d[i * n + j].min(d[j * n + i]);
            d[i * n + j] = m;
            d[j * n + i] = m;
        }
    }
    DistanceOracle::Exact(ExactDistances { n, d })
}

/// Hub-based approximate distances.
#[derive(Debug, Clone)]
pub struct HubDistances {
    n: usize,
    hubs: Vec<u32>,
    /// position of each vertex in `hubs`, if it is one
    hub_index: Vec<Option<u32>>,
    /// `n x hubs.len()`, row `v` holds the distances from each hub to `v`
    to_hub: Vec<f64>,
    nearest: Vec<(u32, f64)>,
    radius: Vec<f64>,
    /// per vertex, `(id, distance)` for everything within its radius, by id
    near: Vec<Vec<(u32, f64)>>,
}

impl HubDistances {
    pub fn hubs(&self) -> &[u32] {
        &self.hubs
    }

    /// Nearest hub of `v` and the distance to it.
    pub fn nearest_hub(&self, v: usize) -> (u32, f64) {
        self.nearest[v]
    }

    pub fn radius(&self, v: usize) -> f64 {
        self.radius[v]
    }

    /// Vertices reached by `v`'s bounded search, with exact distances.
    pub fn neighborhood(&self, v: usize) -> &[(u32, f64)] {
        &self.near[v]
    }

    fn hub_row(&self, v: usize) -> &[f64] {
        let h = self.hubs.len();
        &self.to_hub[v * h..(v + 1) * h]
    }

    /// Distance from the `k`th hub to `v`.
    pub fn hub_distance(&self, k: usize, v: usize) -> f64 {
        self.hub_row(v)[k]
    }

    /// `min` over hubs of `d(u, h) + d(h, v)`.
    pub fn hub_bound(&self, u: usize, v: usize) -> f64 {
        let (a, b) = (u.min(v), u.max(v));
        self.hub_row(a)
            .iter()
            .zip(self.hub_row(b))
            .map(|(x, y)| x + y)
            .fold(f64::INFINITY, f64::min)
    }

    fn lookup(&self, from: usize, to: usize) -> Option<f64> {
        let near = &self.near[from];
        near.binary_search_by_key(&(to as u32), |&(id, _)| id)
            .ok()
            .map(|i| near[i].1)
    }

    pub fn query(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        let (a, b) = (u.min(v), u.max(v));
        match (self.hub_index[a], self.hub_index[b]) {
            (Some(ha), Some(hb)) => {
                return self.hub_row(b)[ha as usize].min(self.hub_row(a)[hb as usize])
            }
            (Some(ha), None) => return self.hub_row(b)[ha as usize],
            (None, Some(hb)) => return self.hub_row(a)[hb as usize],
            (None, None) => {}
        }
        self.lookup(a, b)
            .or_else(|| self.lookup(b, a))
            .unwrap_or_else(|| self.hub_bound(a, b))
    }
}

/// Hubs are the `hub_count` vertices of largest strength (ties to lower id).
pub fn select_hubs(g: &WeightedTmfg, hub_count: usize) -> Vec<u32> {
    let mut order: Vec<u32> = (0..g.n() as u32).collect();
    order.sort_by(|&a, &b| g.strength(b).total_cmp(&g.strength(a)).then(a.cmp(&b)));
    order.truncate(hub_count);
    order
}

pub fn apsp_hub(g: &WeightedTmfg, params: &ApspParams) -> Result<DistanceOracle> {
    let n = g.n();
    params.validate(n)?;
    let hubs = select_hubs(g, params.hub_count);
    let h = hubs.len();

    let mut rows = vec![0.0; h * n];
    rows.par_chunks_mut(n)
        .zip(hubs.par_iter())
        .for_each(|(row, &hub)| full_row(g, hub, row));
    let mut to_hub = vec![0.0; n * h];
    for (k, row) in rows.chunks(n).enumerate() {
        for (v, &d) in row.iter().enumerate() {
            to_hub[v * h + k] = d;
        }
    }
    drop(rows);

    let mut hub_index = vec![None; n];
    for (k, &hub) in hubs.iter().enumerate() {
        hub_index[hub as usize] = Some(k as u32);
    }
    let nearest: Vec<(u32, f64)> = (0..n)
        .map(|v| {
            let row = &to_hub[v * h..(v + 1) * h];
            let mut best = (hubs[0], row[0]);
            for (k, &d) in row.iter().enumerate().skip(1) {
                if d < best.1 {
                    best = (hubs[k], d);
                }
            }
            best
        })
        .collect();
    let radius: Vec<f64> = nearest
        .iter()
        .map(|&(_, d)| params.radius_factor * d)
        .collect();

    let near: Vec<Vec<(u32, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![f64::INFINITY; n], BinaryHeap::new()),
            |(dist, heap), v| {
                let mut found = Vec::new();
                let touched = dijkstra(g, v as u32, radius[v], dist, heap, |u, d| {
                    found.push((u, d))
                });
                for t in touched {
                    dist[t as usize] = f64::INFINITY;
                }
                found.sort_unstable_by_key(|&(u, _)| u);
                found
            },
        )
        .collect();

    Ok(DistanceOracle::Hub(HubDistances {
        n,
        hubs,
        hub_index,
        to_hub,
        nearest,
        radius,
        near,
    }))
}

/// Distances between TMFG vertices, either exact or hub-approximated.
#[derive(Debug, Clone)]
pub enum DistanceOracle {
    Exact(ExactDistances),
    Hub(HubDistances),
}

impl DistanceOracle {
    pub fn build(g: &WeightedTmfg, mode: ApspMode, params: &ApspParams) -> Result<Self> {
        match mode {
            ApspMode::Exact => Ok(apsp_exact(g)),
            ApspMode::Hub => apsp_hub(g, params),
        }
    }

    /// Wraps a precomputed dense distance matrix (row-major, symmetric, zero
    /// diagonal) as an exact oracle.
    pub fn from_dense(n: usize, d: Vec<f64>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::LengthMismatch {
                left: d.len(),
                right: n * n,
            });
        }
        for i in 0..n {
            if d[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let x = d[i * n + j];
                if x != d[j * n + i] || !(x >= 0.0) {
                    return Err(Error::InvalidMatrix(format!(
                        "distance ({i}, {j}) is negative, NaN or asymmetric"
                    )));
                }
            }
        }
        Ok(DistanceOracle::Exact(ExactDistances { n, d }))
    }

    pub fn mode(&self) -> ApspMode {
        match self {
            DistanceOracle::Exact(_) => ApspMode::Exact,
            DistanceOracle::Hub(_) => ApspMode::Hub,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            DistanceOracle::Exact(e) => e.n,
            DistanceOracle::Hub(h) => h.n,
        }
    }

    #[inline]
    pub fn query(&self, u: usize, v: usize) -> f64 {
        match self {
            DistanceOracle::Exact(e) => e.get(u, v),
            DistanceOracle::Hub(h) => h.query(u, v),
        }
    }

    /// Every pairwise query as a dense row-major matrix.
    pub fn to_matrix(&self) -> Vec<f64> {
        let n = self.n();
        match self {
            DistanceOracle::Exact(e) => e.d.clone(),
            DistanceOracle::Hub(_) => {
                let mut out = vec![0.0; n * n];
                out.par_chunks_mut(n.max(1))
                    .enumerate()
                    .for_each(|(u, row)| {
                        for (v, x) in row.iter_mut().enumerate() {
                            *x = self.query(u, v);
                        }
                    });
                out
            }
        }
    }

    /// Writes [`Self::to_matrix`] in the binary matrix format.
    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        write_binary_matrix(path.as_ref(), self.n(), &self.to_matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph() -> WeightedTmfg {
        WeightedTmfg::from_lengths(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn lengths_from_similarity() {
        assert_eq!(edge_length(1.0), 0.0);
        assert_eq!(edge_length(-1.0), 2.0);
        assert_eq!(edge_length(0.5), 1.0);
    }

    #[test]
    fn path_distances() {
        let o = apsp_exact(&path_graph());
        assert_eq!(o.query(0, 2), 2.0);
        assert_eq!(o.query(2, 0), 2.0);
        for v in 0..3 {
            assert_eq!(o.query(v, v), 0.0);
        }
    }

    #[test]
    fn single_hub_on_path() {
        let g = path_graph();
        let o = apsp_hub(&g, &ApspParams { hub_count: 1, radius_factor: 2.0 }).unwrap();
        let DistanceOracle::Hub(h) = &o else { unreachable!() };
        // the middle vertex has two edges, so the largest strength
        assert_eq!(h.hubs(), [1]);
        assert_eq!(h.nearest_hub(2), (1, 1.0));
        assert_eq!(h.radius(2), 2.0);
        assert_eq!(o.query(1, 2), 1.0);
        assert_eq!(o.query(0, 2), 2.0);
    }

    #[test]
    fn hub_bound_used_outside_radius() {
        // path 0 - 1 - 2 - 3; a tiny radius forces the route through hub 1
        let g = WeightedTmfg::from_lengths(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let o = apsp_hub(&g, &ApspParams { hub_count: 1, radius_factor: 1e-9 }).unwrap();
        let DistanceOracle::Hub(h) = &o else { unreachable!() };
        assert_eq!(h.hubs(), [1]);
        assert_eq!(o.query(2, 3), 3.0);
        assert_eq!(o.query(3, 2), 3.0);
        assert_eq!(o.query(0, 1), 1.0);
    }

    #[test]
    fn params_are_validated() {
        let g = path_graph();
        assert!(apsp_hub(&g, &ApspParams { hub_count: 0, radius_factor: 2.0 }).is_err());
        assert!(apsp_hub(&g, &ApspParams { hub_count: 4, radius_factor: 2.0 }).is_err());
        assert!(apsp_hub(&g, &ApspParams { hub_count: 1, radius_factor: -1.0 }).is_err());
        assert_eq!(ApspParams::default_for(10).hub_count, 4);
        assert_eq!("HUB".parse::<ApspMode>().unwrap(), ApspMode::Hub);
    }
}
