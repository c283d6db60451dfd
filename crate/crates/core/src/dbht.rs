//! Directed bubble hierarchy tree clustering.
//!
//! Every 4-clique created while building a TMFG is a bubble; bubbles sharing
//! a face are linked. Links point to the side of the face with the stronger
//! apex, sinks are the converging bubbles, and each vertex ends up under one
//! converging bubble. The dendrogram is complete linkage inside bubbles, then
//! inside converging groups, then across groups.

use rayon::prelude::*;

use crate::apsp::DistanceOracle;
use crate::error::Result;
use crate::linkage::{self, complete_linkage, linkage_from_table, CondensedMatrix, Dendrogram};
use crate::simmatrix::SimilarityMatrix;
use crate::tmfg::{gain, Replay, TmfgGraph};

/// Gap between a merge and the highest merge below it when heights from
/// different layers have to be lifted.
pub const HEIGHT_STEP: f64 = 1e-12;

/// Link between bubble `parent` and the later bubble `child` through `face`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BubbleLink {
    pub parent: usize,
    pub child: usize,
    pub face: [u32; 3],
}

/// Bubble 0 is the initial clique; bubble `k + 1` comes from insertion `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BubbleTree {
    bubbles: Vec<[u32; 4]>,
    links: Vec<BubbleLink>,
}

impl BubbleTree {
    pub fn bubbles(&self) -> &[[u32; 4]] {
        &self.bubbles
    }

    /// Link `k` joins bubble `k + 1` to its parent.
    pub fn links(&self) -> &[BubbleLink] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.bubbles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bubbles.is_empty()
    }

    /// Vertex of `bubble` outside `face`.
    pub fn apex(&self, bubble: usize, face: [u32; 3]) -> u32 {
        self.bubbles[bubble]
            .into_iter()
            .find(|v| !face.contains(v))
            .expect("a bubble has one vertex off each of its faces")
    }
}

pub fn build_bubble_tree(graph: &TmfgGraph) -> Result<BubbleTree> {
    let replay = Replay::run(graph.n(), graph.clique(), graph.insertions())?;
    let mut bubbles = Vec::with_capacity(graph.n() - 3);
    bubbles.push(graph.clique());
    let mut links = Vec::with_capacity(graph.n() - 4);
    for (k, ins) in graph.insertions().iter().enumerate() {
        let [a, b, c] = ins.face;
        let mut q = [ins.vertex, a, b, c];
        q.sort_unstable();
        bubbles.push(q);
        links.push(BubbleLink {
            parent: replay.creator[replay.host[k]],
            child: k + 1,
            face: ins.face,
        });
    }
    Ok(BubbleTree { bubbles, links })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedBubbleTree {
    tree: BubbleTree,
    /// per link: true when it points from parent to child
    toward_child: Vec<bool>,
    out: Vec<Vec<usize>>,
}

impl DirectedBubbleTree {
    pub fn tree(&self) -> &BubbleTree {
        &self.tree
    }

    /// `(from, to)` of link `k`.
    pub fn direction(&self, k: usize) -> (usize, usize) {
        let l = self.tree.links[k];
        if self.toward_child[k] {
            (l.parent, l.child)
        } else {
            (l.child, l.parent)
        }
    }

    /// Indices of links leaving `bubble`.
    pub fn out_links(&self, bubble: usize) -> &[usize] {
        &self.out[bubble]
    }

    pub fn out_degree(&self, bubble: usize) -> usize {
        self.out[bubble].len()
    }
}

/// Points each link at the bubble whose apex has the larger gain to the
/// shared face; equal gains point at the earlier bubble.
pub fn orient_edges(tree: BubbleTree, s: &SimilarityMatrix) -> DirectedBubbleTree {
    let mut out = vec![Vec::new(); tree.len()];
    let toward_child: Vec<bool> = tree
        .links
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let up = gain(l.face, tree.apex(l.parent, l.face), s);
            let down = gain(l.face, tree.apex(l.child, l.face), s);
            let to_child = down > up;
            out[if to_child { l.parent } else { l.child }].push(k);
            to_child
        })
        .collect();
    DirectedBubbleTree {
        tree,
        toward_child,
        out,
    }
}

/// Bubbles without outgoing links, ascending.
pub fn converging_bubbles(dtree: &DirectedBubbleTree) -> Vec<usize> {
    (0..dtree.tree.len())
        .filter(|&b| dtree.out_degree(b) == 0)
        .collect()
}

/// Follows outgoing links from `bubble` to a sink. Where several links leave
/// a bubble the one whose far apex has the largest gain to the shared face
/// wins, ties to the earlier far bubble.
pub fn converging_of(dtree: &DirectedBubbleTree, s: &SimilarityMatrix, mut bubble: usize) -> usize {
    loop {
        let best = dtree
            .out_links(bubble)
            .iter()
            .map(|&k| {
                let to = dtree.direction(k).1;
                let face = dtree.tree.links[k].face;
                (gain(face, dtree.tree.apex(to, face), s), to)
            })
            .reduce(|a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            });
        match best {
            Some((_, to)) => bubble = to,
            None => return bubble,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BubbleAssignment {
    /// bubble each vertex is assigned to
    pub bubble: Vec<usize>,
    /// converging bubble each vertex ends up under
    pub converging: Vec<usize>,
}

impl BubbleAssignment {
    /// Converging groups as flat labels, numbered by smallest member.
    pub fn partition(&self) -> Vec<usize> {
        let mut label_of = std::collections::HashMap::new();
        self.converging
            .iter()
            .map(|&c| {
                let next = label_of.len();
                *label_of.entry(c).or_insert(next)
            })
            .collect()
    }

    /// Number of converging bubbles with at least one vertex.
    pub fn group_count(&self) -> usize {
        let mut c = self.converging.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }
}

/// Assigns each vertex to the bubble containing it with the smallest mean
/// distance to the bubble's four vertices (ties to the earlier bubble).
pub fn assign_vertices(
    dtree: &DirectedBubbleTree,
    s: &SimilarityMatrix,
    oracle: &DistanceOracle,
) -> BubbleAssignment {
    let bubbles = dtree.tree.bubbles();
    let n = oracle.n();
    let mut best: Vec<(f64, usize)> = vec![(f64::INFINITY, usize::MAX); n];
    for (b, q) in bubbles.iter().enumerate() {
        for &v in q {
            let mean = q
                .iter()
                .map(|&w| oracle.query(v as usize, w as usize))
                .sum::<f64>()
                / 4.0;
            let slot = &mut best[v as usize];
            if mean < slot.0 {
                *slot = (mean, b);
            }
        }
    }
    let mut sink = vec![usize::MAX; bubbles.len()];
    let bubble: Vec<usize> = best.into_iter().map(|(_, b)| b).collect();
    let converging = bubble
        .iter()
        .map(|&b| {
            if sink[b] == usize::MAX {
                sink[b] = converging_of(dtree, s, b);
            }
            sink[b]
        })
        .collect();
    BubbleAssignment { bubble, converging }
}

/// A cluster produced by one layer and the height of its top merge.
struct Cluster {
    members: Vec<u32>,
    top: f64,
}

type RawMerge = (usize, usize, f64);

/// Three-layer complete linkage over the assignment.
///
/// Merge heights are lifted where needed so they never drop below a merge
/// they contain, and every cross-group merge sits above all merges inside
/// groups. Cutting at [`BubbleAssignment::group_count`] clusters therefore
/// returns the converging groups.
pub fn build_hierarchy(assignment: &BubbleAssignment, oracle: &DistanceOracle) -> Dendrogram {
    let n = assignment.bubble.len();
    let dist = |a: usize, b: usize| oracle.query(a, b);

    // converging group -> bubble -> members, all ascending
    let mut by_group: std::collections::BTreeMap<usize, std::collections::BTreeMap<usize, Vec<u32>>> =
        Default::default();
    for v in 0..n {
        by_group
            .entry(assignment.converging[v])
            .or_default()
            .entry(assignment.bubble[v])
            .or_default()
            .push(v as u32);
    }

    let layered: Vec<(Cluster, Vec<RawMerge>)> = by_group
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|bubbles| {
            let mut merges = Vec::new();
            let clusters: Vec<Cluster> = bubbles
                .into_values()
                .map(|members| {
                    let items: Vec<usize> = members.iter().map(|&v| v as usize).collect();
                    let d = complete_linkage(&items, dist);
                    let top = emit(&d, &members, &mut merges, |h, _| h);
                    Cluster { members, top }
                })
                .collect();
            let merged = merge_clusters(clusters, oracle, &mut merges, |h, floor| {
                if h < floor {
                    floor + HEIGHT_STEP
                } else {
                    h
                }
            });
            (merged, merges)
        })
        .collect();

    let mut merges: Vec<RawMerge> = Vec::with_capacity(n.saturating_sub(1));
    let mut groups = Vec::with_capacity(layered.len());
    for (c, m) in layered {
        merges.extend(m);
        groups.push(c);
    }
    let inner_max = merges.iter().map(|m| m.2).fold(f64::NEG_INFINITY, f64::max);
    let lift = if inner_max.is_finite() { inner_max + HEIGHT_STEP } else { f64::NEG_INFINITY };
    merge_clusters(groups, oracle, &mut merges, |h, _| h.max(lift));

    linkage::relabel(n, merges)
}

/// Appends `d`'s merges (over `members`) to `out` with heights passed through
/// `adjust(height, highest child height)`; returns the top height.
fn emit(
    d: &Dendrogram,
    members: &[u32],
    out: &mut Vec<RawMerge>,
    adjust: impl Fn(f64, f64) -> f64,
) -> f64 {
    let m = members.len();
    let mut rep: Vec<usize> = members.iter().map(|&v| v as usize).collect();
    let mut top = vec![f64::NEG_INFINITY; m];
    for mg in d.merges() {
        let floor = top[mg.left].max(top[mg.right]);
        let h = adjust(mg.height, floor);
        out.push((rep[mg.left], rep[mg.right], h));
        rep.push(rep[mg.left]);
        top.push(h);
    }
    top.last().copied().unwrap_or(f64::NEG_INFINITY)
}

/// Complete linkage over whole clusters, where the distance between two
/// clusters is the largest distance between their members.
fn merge_clusters(
    clusters: Vec<Cluster>,
    oracle: &DistanceOracle,
    out: &mut Vec<RawMerge>,
    adjust: impl Fn(f64, f64) -> f64,
) -> Cluster {
    let k = clusters.len();
    if k == 1 {
        return clusters.into_iter().next().unwrap();
    }
    let rows: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|i| {
            (i + 1..k)
                .map(|j| {
                    let mut worst = f64::NEG_INFINITY;
                    for &a in &clusters[i].members {
                        for &b in &clusters[j].members {
                            worst = worst.max(oracle.query(a as usize, b as usize));
                        }
                    }
                    worst
                })
                .collect()
        })
        .collect();
    let mut table = CondensedMatrix::new(k);
    for (i, row) in rows.iter().enumerate() {
        for (off, &d) in row.iter().enumerate() {
            table.set(i, i + 1 + off, d);
        }
    }
    let d = linkage_from_table(table);

    let mut rep: Vec<usize> = clusters.iter().map(|c| c.members[0] as usize).collect();
    let mut top: Vec<f64> = clusters.iter().map(|c| c.top).collect();
    for mg in d.merges() {
        let floor = top[mg.left].max(top[mg.right]);
        let h = adjust(mg.height, floor);
        out.push((rep[mg.left], rep[mg.right], h));
        rep.push(rep[mg.left]);
        top.push(h);
    }
    let mut members: Vec<u32> = clusters.into_iter().flat_map(|c| c.members).collect();
    members.sort_unstable();
    Cluster {
        members,
        top: *top.last().unwrap(),
    }
}

/// Everything DBHT produces for one graph.
#[derive(Debug, Clone)]
pub struct Dbht {
    pub tree: DirectedBubbleTree,
    pub converging: Vec<usize>,
    pub assignment: BubbleAssignment,
    pub dendrogram: Dendrogram,
}

/// Runs the whole DBHT stage.
pub fn dbht(graph: &TmfgGraph, s: &SimilarityMatrix, oracle: &DistanceOracle) -> Result<Dbht> {
    let tree = orient_edges(build_bubble_tree(graph)?, s);
    let converging = converging_bubbles(&tree);
    let assignment = assign_vertices(&tree, s, oracle);
    let dendrogram = build_hierarchy(&assignment, oracle);
    Ok(Dbht {
        tree,
        converging,
        assignment,
        dendrogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apsp::{apsp_exact, to_weighted};
    use crate::tmfg::{build_tmfg_exact, BuildConfig};

    fn k4() -> (SimilarityMatrix, TmfgGraph) {
        let s = SimilarityMatrix::from_fn(4, |i, j| 0.1 * (i + j) as f64).unwrap();
        let g = build_tmfg_exact(&s, &BuildConfig::exact(1));
        (s, g)
    }

    #[test]
    fn four_vertices_form_one_bubble() {
        let (s, g) = k4();
        let tree = build_bubble_tree(&g).unwrap();
        assert_eq!(tree.bubbles(), [[0, 1, 2, 3]]);
        assert!(tree.links().is_empty());
        let d = orient_edges(tree, &s);
        assert_eq!(converging_bubbles(&d), [0]);
        let oracle = apsp_exact(&to_weighted(&g, &s));
        let a = assign_vertices(&d, &s, &oracle);
        assert_eq!(a.bubble, [0; 4]);
        assert_eq!(a.converging, [0; 4]);
        let dend = build_hierarchy(&a, &oracle);
        assert_eq!(dend.merges().len(), 3);
        let reference = complete_linkage(&[0, 1, 2, 3], |a, b| oracle.query(a, b));
        assert_eq!(dend, reference);
    }

    #[test]
    fn five_vertices_share_the_host_face() {
        let s = SimilarityMatrix::from_fn(5, |i, j| ((i * 3 + j * 3) as f64).sin() * 0.8).unwrap();
        let g = build_tmfg_exact(&s, &BuildConfig::exact(1));
        let tree = build_bubble_tree(&g).unwrap();
        assert_eq!(tree.len(), 2);
        let link = tree.links()[0];
        assert_eq!((link.parent, link.child), (0, 1));
        assert_eq!(link.face, g.insertions()[0].face);
        let shared = tree.bubbles()[0]
            .iter()
            .filter(|v| tree.bubbles()[1].contains(v))
            .count();
        assert_eq!(shared, 3);
    }

    fn two_bubbles(up: f64, down: f64) -> DirectedBubbleTree {
        // face {0,1,2}; apex 3 in bubble 0, apex 4 in bubble 1
        let s = SimilarityMatrix::from_fn(5, |i, j| match (i.min(j), i.max(j)) {
            (0..=2, 3) => up / 3.0,
            (0..=2, 4) => down / 3.0,
            _ => 0.0,
        })
        .unwrap();
        let tree = BubbleTree {
            bubbles: vec![[0, 1, 2, 3], [0, 1, 2, 4]],
            links: vec![BubbleLink { parent: 0, child: 1, face: [0, 1, 2] }],
        };
        orient_edges(tree, &s)
    }

    #[test]
    fn links_point_to_stronger_apex() {
        let d = two_bubbles(0.3, 0.6);
        assert_eq!(d.direction(0), (0, 1));
        assert_eq!(converging_bubbles(&d), [1]);
        let d = two_bubbles(0.6, 0.3);
        assert_eq!(d.direction(0), (1, 0));
        assert_eq!(converging_bubbles(&d), [0]);
    }

    #[test]
    fn equal_gains_point_to_earlier_bubble() {
        let d = two_bubbles(0.45, 0.45);
        assert_eq!(d.direction(0), (1, 0));
    }

    #[test]
    fn two_groups_join_at_cross_distance() {
        // groups {0, 1, 2} and {3, 4}, far apart
        let pos = [0.0, 0.1, 0.3, 5.0, 5.2];
        let n = pos.len();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = f64::abs(pos[i] - pos[j]);
            }
        }
        let oracle = DistanceOracle::from_dense(n, d).unwrap();
        let a = BubbleAssignment {
            bubble: vec![0, 0, 0, 1, 1],
            converging: vec![0, 0, 0, 1, 1],
        };
        let dend = build_hierarchy(&a, &oracle);
        let last = dend.merges().last().unwrap();
        assert_eq!(last.size, 5);
        assert_eq!(last.height, 5.2);
        assert_eq!(dend.cut(2).unwrap(), [0, 0, 0, 1, 1]);
    }
}
