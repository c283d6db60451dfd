use std::collections::BinaryHeap;

use crate::simmatrix::{SimilarityMatrix, SortedNeighborLists};

use super::state::{GainEntry, TmfgState};
use super::{select_initial_clique, BuildConfig, BuildOutput, BuildStats, Clock, TmfgGraph};

/// Heap-based builder: one vertex per step, with lazy revalidation.
///
/// Face entries sit in a max-heap. A popped entry whose vertex is still
/// uninserted is applied; otherwise the face's candidate is recomputed from
/// its corners' current max-corr targets and pushed back. Only the four
/// vertices of an applied pair get their max-corr refreshed.
pub fn build_tmfg_heap(
    s: &SimilarityMatrix,
    lists: &SortedNeighborLists,
    config: &BuildConfig,
) -> TmfgGraph {
    run(s, lists, config).graph
}

pub(crate) fn run(
    s: &SimilarityMatrix,
    lists: &SortedNeighborLists,
    config: &BuildConfig,
) -> BuildOutput {
    let mut clock = Clock::start();
    let clique = select_initial_clique(s);
    let initial_faces = clock.lap();

    let checks = config.oracle_checks;
    let mut st = TmfgState::new(s, clique);
    let mut stats = BuildStats::default();
    // oracle mode: whether each face's queued entry was the exhaustive best
    let mut queued_exact: Vec<bool> = Vec::new();

    for v in clique {
        st.refresh_max_corr(v, lists);
    }
    let mut heap = BinaryHeap::with_capacity(2 * s.size());
    for f in 0..4 {
        if let Some(e) = st.corr_candidate(f, s, lists) {
            if checks {
                queued_exact.resize(st.face_count(), false);
                queued_exact[f] = is_exhaustive_best(&st, &e, s);
            }
            heap.push(e);
        }
    }

    while st.remaining() > 0 {
        if checks {
            assert_eq!(heap.len(), st.live_count(), "one heap entry per live face");
        }
        let top: GainEntry = heap.pop().expect("heap holds an entry for every live face");
        stats.pops += 1;
        let face = st.face(top.face);

        if !st.is_inserted(top.vertex) {
            let created = st.insert(top.vertex, top.face, s);
            stats.rounds += 1;
            if st.remaining() == 0 {
                break;
            }
            st.refresh_max_corr(top.vertex, lists);
            for w in face {
                st.refresh_max_corr(w, lists);
            }
            if checks {
                let mut touched = face.to_vec();
                touched.push(top.vertex);
                check_max_corrs(&st, s, lists, &touched);
                queued_exact.resize(st.face_count(), false);
            }
            for f in created {
                let e = st
                    .corr_candidate(f, s, lists)
                    .expect("uninserted vertices remain");
                if checks {
                    queued_exact[f] = is_exhaustive_best(&st, &e, s);
                }
                heap.push(e);
            }
        } else {
            for w in face {
                st.refresh_max_corr(w, lists);
            }
            if checks {
                check_max_corrs(&st, s, lists, &face);
            }
            let e = st
                .corr_candidate(top.face, s, lists)
                .expect("uninserted vertices remain");
            stats.refreshes += 1;
            if e.gain > top.gain {
                stats.gain_increases += 1;
            }
            if checks {
                let now_exact = is_exhaustive_best(&st, &e, s);
                if queued_exact[top.face] && now_exact && e.gain > top.gain + 1e-12 {
                    stats.monotonicity_violations += 1;
                }
                queued_exact[top.face] = now_exact;
            }
            heap.push(e);
        }
    }

    let insertion = clock.lap();
    BuildOutput {
        graph: st.finish(),
        stats,
        initial_faces,
        insertion,
    }
}

fn is_exhaustive_best(st: &TmfgState, e: &GainEntry, s: &SimilarityMatrix) -> bool {
    st.brute_force_best(e.face, s)
        .is_some_and(|b| b.vertex == e.vertex && b.gain == e.gain)
}

fn check_max_corrs(
    st: &TmfgState,
    s: &SimilarityMatrix,
    lists: &SortedNeighborLists,
    vertices: &[u32],
) {
    for &v in vertices {
        assert_eq!(
            st.max_corr(v, lists),
            st.brute_force_max_corr(v, s),
            "stale max-corr for vertex {v}"
        );
    }
}
