//! Brute-force reference implementations and dataset lookup shared by the
//! integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use tdbht::tmfg::Insertion;
use tdbht::{load_ucr_splits, Dataset, SimilarityMatrix};

/// Directory holding UCR files, either flat (`Name_TRAIN.tsv`) or nested
/// (`Name/Name_TRAIN.tsv`). Overridable with `TDBHT_UCR_DIR`.
pub fn ucr_dir() -> PathBuf {
    std::env::var_os("TDBHT_UCR_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/ucr"))
}

pub fn ucr_prefix(name: &str) -> Option<PathBuf> {
    let dir = ucr_dir();
    [dir.clone(), dir.join(name)]
        .into_iter()
        .find(|d| d.join(format!("{name}_TRAIN.tsv")).is_file())
        .map(|d| d.join(name))
}

pub fn load_ucr(name: &str) -> Option<Dataset> {
    let prefix = ucr_prefix(name)?;
    Some(load_ucr_splits(prefix.parent().unwrap(), name).expect("readable UCR files"))
}

/// Greedy TMFG by exhaustive search over every (live face, uninserted
/// vertex) pair each round. Faces are numbered in creation order: the four
/// clique faces `abc, abd, acd, bcd`, then `vxy, vyz, vxz` for each insertion
/// of `v` into `xyz`. Ties go to the lower face number, then the lower vertex.
pub fn brute_force_tmfg(s: &SimilarityMatrix) -> ([u32; 4], Vec<Insertion>) {
    let n = s.size();
    let clique = brute_force_clique(s);
    let [a, b, c, d] = clique;
    let mut faces: Vec<([u32; 3], bool)> =
        vec![([a, b, c], true), ([a, b, d], true), ([a, c, d], true), ([b, c, d], true)];
    let mut inserted = vec![false; n];
    for v in clique {
        inserted[v as usize] = true;
    }
    let mut trace = Vec::new();
    for _ in 4..n {
        let mut best: Option<(f64, usize, u32)> = None;
        for (f, &(face, live)) in faces.iter().enumerate() {
            if !live {
                continue;
            }
            for v in 0..n as u32 {
                if inserted[v as usize] {
                    continue;
                }
                let vi = v as usize;
                let g = s.get(vi, face[0] as usize)
                    + s.get(vi, face[1] as usize)
                    + s.get(vi, face[2] as usize);
                if best.is_none_or(|(bg, _, _)| g > bg) {
                    best = Some((g, f, v));
                }
            }
        }
        let (_, f, v) = best.unwrap();
        let [x, y, z] = faces[f].0;
        faces[f].1 = false;
        inserted[v as usize] = true;
        trace.push(Insertion { vertex: v, face: [x, y, z] });
        for mut t in [[v, x, y], [v, y, z], [v, x, z]] {
            t.sort_unstable();
            faces.push((t, true));
        }
    }
    (clique, trace)
}

/// Four largest off-diagonal row sums, ties to lower ids, by full sort.
pub fn brute_force_clique(s: &SimilarityMatrix) -> [u32; 4] {
    let n = s.size();
    let mut rows: Vec<(f64, u32)> = (0..n)
        .map(|i| ((0..n).filter(|&j| j != i).map(|j| s.get(i, j)).sum(), i as u32))
        .collect();
    rows.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let mut c = [rows[0].1, rows[1].1, rows[2].1, rows[3].1];
    c.sort_unstable();
    c
}

/// Dense all-pairs distances by Floyd-Warshall.
pub fn floyd_warshall(n: usize, edges: &[(u32, u32, f64)]) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for &(a, b, w) in edges {
        let (a, b) = (a as usize, b as usize);
        d[a * n + b] = d[a * n + b].min(w);
        d[b * n + a] = d[b * n + a].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i * n + k] + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    d
}

/// Complete linkage by repeatedly scanning every pair of clusters. Returns
/// each merge as (sorted members of the new cluster, height).
pub fn naive_complete_linkage(n: usize, dist: &[f64]) -> Vec<(Vec<usize>, f64)> {
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let mut h = f64::NEG_INFINITY;
                for &a in &clusters[i] {
                    for &b in &clusters[j] {
                        h = h.max(dist[a * n + b]);
                    }
                }
                if h < best.0 {
                    best = (h, i, j);
                }
            }
        }
        let (h, i, j) = best;
        let right = clusters.remove(j);
        clusters[i].extend(right);
        clusters[i].sort_unstable();
        out.push((clusters[i].clone(), h));
    }
    out
}

/// ARI from the four pair counts over all `n choose 2` object pairs.
pub fn pair_counting_ari(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len();
    let (mut ss, mut sd, mut ds, mut dd) = (0f64, 0f64, 0f64, 0f64);
    for i in 0..n {
        for j in i + 1..n {
            match (x[i] == x[j], y[i] == y[j]) {
                (true, true) => ss += 1.0,
                (true, false) => sd += 1.0,
                (false, true) => ds += 1.0,
                (false, false) => dd += 1.0,
            }
        }
    }
    let denom = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
    if denom == 0.0 {
        return if sd == 0.0 && ds == 0.0 { 1.0 } else { 0.0 };
    }
    2.0 * (ss * dd - sd * ds) / denom
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for l in 0..=max + 1 {
            cur[i] = l;
            rec(i + 1, max.max(l), cur, out);
        }
    }
    if n > 0 {
        rec(1, 0, &mut cur, &mut out);
    }
    out
}
