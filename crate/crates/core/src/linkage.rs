//! Complete-linkage agglomerative clustering and dendrogram cuts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One agglomeration step. Leaves are `0..n`; the `i`th merge creates
/// cluster `n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n_leaves: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Checks the merge list forms a full binary tree with nondecreasing
    /// heights and consistent sizes.
    pub fn new(n_leaves: usize, merges: Vec<Merge>) -> Result<Self> {
        if n_leaves == 0 {
            return Err(Error::InvalidInput("dendrogram needs at least one leaf".into()));
        }
        if merges.len() != n_leaves - 1 {
            return Err(Error::InvalidInput(format!(
                "{} leaves need {} merges, got {}",
                n_leaves,
                n_leaves - 1,
                merges.len()
            )));
        }
        let mut size = vec![1usize; n_leaves];
        let mut used = vec![false; 2 * n_leaves - 1];
        let mut last = f64::NEG_INFINITY;
        for (i, m) in merges.iter().enumerate() {
            let id = n_leaves + i;
            for c in [m.left, m.right] {
                if c >= id || used[c] {
                    return Err(Error::InvalidInput(format!(
                        "merge {i} reuses or forward-references cluster {c}"
                    )));
                }
                used[c] = true;
            }
            if m.left == m.right {
                return Err(Error::InvalidInput(format!("merge {i} joins a cluster with itself")));
            }
            if m.height.is_nan() || m.height < last {
                return Err(Error::InvalidInput(format!("merge {i} height decreases")));
            }
            last = m.height;
            let s = size[m.left] + size[m.right];
            if s != m.size {
                return Err(Error::InvalidInput(format!(
                    "merge {i} has size {} but children sum to {s}",
                    m.size
                )));
            }
            size.push(s);
        }
        Ok(Dendrogram { n_leaves, merges })
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> impl Iterator<Item = f64> + '_ {
        self.merges.iter().map(|m| m.height)
    }

    /// Leaves under `cluster`, ascending.
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![cluster];
        while let Some(c) = stack.pop() {
            if c < self.n_leaves {
                out.push(c);
            } else {
                let m = &self.merges[c - self.n_leaves];
                stack.push(m.left);
                stack.push(m.right);
            }
        }
        out.sort_unstable();
        out
    }

    /// Flat clustering with exactly `k` clusters: the last `k - 1` merges are
    /// undone. Labels follow the order of each cluster's smallest leaf.
    pub fn cut(&self, k: usize) -> Result<Vec<usize>> {
        let n = self.n_leaves;
        if k == 0 || k > n {
            return Err(Error::ClusterCountOutOfRange { k, n });
        }
        let mut parent: Vec<usize> = (0..2 * n - 1).collect();
        for (i, m) in self.merges[..n - k].iter().enumerate() {
            parent[m.left] = n + i;
            parent[m.right] = n + i;
        }
        let mut labels = vec![usize::MAX; n];
        let mut label_of_root = vec![usize::MAX; 2 * n - 1];
        let mut next = 0;
        for (leaf, label) in labels.iter_mut().enumerate() {
            let mut r = leaf;
            while parent[r] != r {
                r = parent[r];
            }
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            *label = label_of_root[r];
        }
        Ok(labels)
    }

    /// One `left right height size` row per merge.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.merges.len() * 32);
        for m in &self.merges {
            let _ = writeln!(out, "{} {} {} {}", m.left, m.right, m.height, m.size);
        }
        out
    }

    pub fn from_text(n_leaves: usize, text: &str) -> Result<Self> {
        let mut merges = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            let [l, r, h, s] = f[..] else {
                return Err(bad(format!("expected `left right height size`, got `{line}`")));
            };
            let num = |x: &str| x.parse::<usize>().map_err(|_| bad(format!("bad integer `{x}`")));
            merges.push(Merge {
                left: num(l)?,
                right: num(r)?,
                height: h.parse().map_err(|_| bad(format!("bad height `{h}`")))?,
                size: num(s)?,
            });
        }
        Dendrogram::new(n_leaves, merges)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Complete linkage over `items`, with `dist` called on item ids. Leaf `i` of
/// the result is `items[i]`.
pub fn complete_linkage(items: &[usize], dist: impl Fn(usize, usize) -> f64) -> Dendrogram {
    let m = items.len();
    let mut table = CondensedMatrix::new(m);
    for i in 0..m {
        for j in i + 1..m {
            table.set(i, j, dist(items[i], items[j]));
        }
    }
    linkage_from_table(table)
}

/// Upper-triangular distance table without the diagonal.
#[derive(Debug, Clone)]
pub struct CondensedMatrix {
    n: usize,
    values: Vec<f64>,
}

impl CondensedMatrix {
    pub fn new(n: usize) -> Self {
        CondensedMatrix {
            n,
            values: vec![0.0; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.values[self.index(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, d: f64) {
        let k = self.index(i, j);
        self.values[k] = d;
    }
}

/// Nearest-neighbor-chain complete linkage. Ties go to the chain predecessor
/// first, then to the lowest slot index.
pub fn linkage_from_table(mut d: CondensedMatrix) -> Dendrogram {
    let n = d.size();
    assert!(n > 0, "linkage needs at least one item");
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    // (slot a, slot b, height); slots double as a representative leaf
    let mut raw: Vec<(usize, usize, f64)> = Vec::with_capacity(n - 1);
    let mut chain: Vec<usize> = Vec::with_capacity(n);

    while raw.len() + 1 < n {
        if chain.is_empty() {
            chain.push(active.iter().position(|&a| a).expect("two active clusters remain"));
        }
        loop {
            let a = *chain.last().unwrap();
            let prev = chain.len().checked_sub(2).map(|i| chain[i]);
            let (mut best, mut best_d) = match prev {
                Some(p) => (p, d.get(a, p)),
                None => (usize::MAX, f64::INFINITY),
            };
            for b in 0..n {
                if b == a || !active[b] {
                    continue;
                }
                let db = d.get(a, b);
                if db < best_d || (best == usize::MAX && db == best_d) {
                    best = b;
                    best_d = db;
                }
            }
            if Some(best) == prev {
                chain.pop();
                chain.pop();
                let (keep, drop) = (a.min(best), a.max(best));
                raw.push((keep, drop, best_d));
                active[drop] = false;
                size[keep] += size[drop];
                for k in 0..n {
                    if active[k] && k != keep {
                        let v = d.get(keep, k).max(d.get(drop, k));
                        d.set(keep, k, v);
                    }
                }
                break;
            }
            chain.push(best);
        }
    }

    relabel(n, raw)
}

/// Sorts raw slot merges by height (stable) and renumbers them so merge `i`
/// creates cluster `n + i`.
pub(crate) fn relabel(n: usize, mut raw: Vec<(usize, usize, f64)>) -> Dendrogram {
    raw.sort_by(|x, y| x.2.total_cmp(&y.2));
    let mut parent: Vec<usize> = (0..2 * n - 1).collect();
    let mut size = vec![1usize; 2 * n - 1];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut merges = Vec::with_capacity(raw.len());
    for (i, (a, b, h)) in raw.into_iter().enumerate() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        let id = n + i;
        parent[ra] = id;
        parent[rb] = id;
        size[id] = size[ra] + size[rb];
        merges.push(Merge {
            left: ra.min(rb),
            right: ra.max(rb),
            height: h,
            size: size[id],
        });
    }
    Dendrogram::new(n, merges).expect("linkage output is a valid dendrogram")
}
