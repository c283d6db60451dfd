use rayon::prelude::*;

use crate::simmatrix::SimilarityMatrix;

use super::state::{exact_best, GainEntry, TmfgState};
use super::{select_initial_clique, BuildConfig, BuildOutput, BuildStats, Clock, TmfgGraph};

/// Prefix baseline: each round computes, for every live face, its best
/// uninserted vertex by a full scan, then inserts the top `prefix_size`
/// pairs. When one vertex is the best for several selected faces only the
/// highest-gain pair is kept.
pub fn build_tmfg_exact(s: &SimilarityMatrix, config: &BuildConfig) -> TmfgGraph {
    run(s, config).graph
}

pub(crate) fn run(s: &SimilarityMatrix, config: &BuildConfig) -> BuildOutput {
    let mut clock = Clock::start();
    let clique = select_initial_clique(s);
    let initial_faces = clock.lap();

    let p = config.prefix_size.max(1);
    let mut st = TmfgState::new(s, clique);
    let mut stats = BuildStats::default();
    let mut remaining = st.remaining_vertices();

    while !remaining.is_empty() {
        let live: Vec<usize> = st.live_faces().collect();
        let mut entries: Vec<GainEntry> = live
            .par_iter()
            .filter_map(|&f| exact_best(s, f, st.face(f), &remaining))
            .collect();

        let chosen = select_prefix(&mut entries, p);
        for e in &chosen {
            st.mark_inserted(e.vertex);
        }
        for e in &chosen {
            st.subdivide(e.vertex, e.face, s);
        }
        remaining.retain(|&v| !st.is_inserted(v));
        stats.rounds += 1;
    }

    let insertion = clock.lap();
    BuildOutput {
        graph: st.finish(),
        stats,
        initial_faces,
        insertion,
    }
}

/// Top `p` entries by preference with duplicate vertices dropped (the first,
/// best, pair for a vertex wins). Faces are distinct by construction.
pub(crate) fn select_prefix(entries: &mut Vec<GainEntry>, p: usize) -> Vec<GainEntry> {
    if p == 1 {
        return entries.iter().max().copied().into_iter().collect();
    }
    if entries.len() > p {
        entries.select_nth_unstable_by(p - 1, |a, b| b.cmp(a));
        entries.truncate(p);
    }
    entries.par_sort_unstable_by(|a, b| b.cmp(a));
    let mut taken = std::collections::HashSet::with_capacity(entries.len());
    entries
        .iter()
        .copied()
        .filter(|e| taken.insert(e.vertex))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tmfg::gain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> SimilarityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SimilarityMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn five_vertices_pick_best_of_four_faces() {
        for seed in 0..30 {
            let s = random_matrix(5, seed);
            let g = build_tmfg_exact(&s, &BuildConfig::exact(1));
            let c = g.clique();
            let rest = (0..5u32).find(|v| !c.contains(v)).unwrap();
            let faces = [
                [c[0], c[1], c[2]],
                [c[0], c[1], c[3]],
                [c[0], c[2], c[3]],
                [c[1], c[2], c[3]],
            ];
            let mut best = faces[0];
            for f in &faces[1..] {
                if gain(*f, rest, &s) > gain(best, rest, &s) {
                    best = *f;
                }
            }
            assert_eq!(g.insertions()[0].vertex, rest);
            assert_eq!(g.insertions()[0].face, best, "seed {seed}");
        }
    }

    #[test]
    fn prefix_rounds_drop_conflicting_vertices() {
        let mut entries = vec![
            GainEntry { face: 0, vertex: 7, gain: 2.0 },
            GainEntry { face: 1, vertex: 7, gain: 2.5 },
            GainEntry { face: 2, vertex: 5, gain: 1.0 },
            GainEntry { face: 3, vertex: 6, gain: 0.1 },
        ];
        let chosen = select_prefix(&mut entries, 3);
        assert_eq!(chosen.len(), 2);
        assert_eq!((chosen[0].face, chosen[0].vertex), (1, 7));
        assert_eq!((chosen[1].face, chosen[1].vertex), (2, 5));
    }

    #[test]
    fn large_prefix_still_builds_valid_graph() {
        let s = random_matrix(60, 11);
        for p in [2, 10, 200] {
            let out = run(&s, &BuildConfig::exact(p));
            out.graph.validate().unwrap();
            assert!(out.stats.rounds <= 56);
            if p == 200 {
                assert!(out.stats.rounds < 56);
            }
        }
    }
}
