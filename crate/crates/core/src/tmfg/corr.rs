use rayon::prelude::*;

use crate::simmatrix::{SimilarityMatrix, SortedNeighborLists};

use super::exact::select_prefix;
use super::state::{FaceId, GainEntry, TmfgState};
use super::{select_initial_clique, BuildConfig, BuildOutput, BuildStats, Clock, TmfgGraph};

/// Below this many faces the per-round scans stay sequential.
const PAR_SCAN_MIN: usize = 8192;

/// Correlation-based builder.
///
/// Each face keeps one gain entry whose vertex is the best of the (up to
/// three) most similar uninserted neighbors of its corners. A round takes the
/// `prefix_size` best entries, keeps the highest-gain pair per vertex, inserts
/// them, then recomputes entries for the new faces and for every face whose
/// candidate was just inserted.
pub fn build_tmfg_corr(
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

    let p = config.prefix_size.max(1);
    let mut st = TmfgState::new(s, clique);
    let mut stats = BuildStats::default();

    for v in clique {
        st.refresh_max_corr(v, lists);
    }
    let mut gains: Vec<Option<GainEntry>> = (0..4)
        .map(|f| st.corr_candidate(f, s, lists))
        .collect();
    if config.oracle_checks {
        check_max_corrs(&st, s, lists, &clique);
    }

    while st.remaining() > 0 {
        let chosen = if p == 1 {
            best_entry(&gains).into_iter().collect()
        } else {
            let mut live: Vec<GainEntry> = gains.iter().flatten().copied().collect();
            select_prefix(&mut live, p)
        };
        assert!(
            !chosen.is_empty(),
            "no candidate while {} vertices remain",
            st.remaining()
        );

        for e in &chosen {
            st.mark_inserted(e.vertex);
        }
        let mut update: Vec<FaceId> = Vec::with_capacity(3 * chosen.len() + 8);
        for e in &chosen {
            gains[e.face] = None;
            let created = st.subdivide(e.vertex, e.face, s);
            gains.extend([None; 3]);
            update.extend(created);
        }
        update.extend(stale_faces(&gains, &st));
        update.sort_unstable();
        update.dedup();

        let mut corners: Vec<u32> = update.iter().flat_map(|&f| st.face(f)).collect();
        corners.sort_unstable();
        corners.dedup();
        st.refresh_many(&corners, lists);
        if config.oracle_checks {
            check_max_corrs(&st, s, lists, &corners);
        }

        let fresh: Vec<Option<GainEntry>> = if update.len() >= 64 {
            update
                .par_iter()
                .map(|&f| st.corr_candidate(f, s, lists))
                .collect()
        } else {
            update
                .iter()
                .map(|&f| st.corr_candidate(f, s, lists))
                .collect()
        };
        for (f, e) in update.into_iter().zip(fresh) {
            gains[f] = e;
        }
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

fn best_entry(gains: &[Option<GainEntry>]) -> Option<GainEntry> {
    if gains.len() >= PAR_SCAN_MIN {
        gains.par_iter().flatten().copied().max()
    } else {
        gains.iter().flatten().copied().max()
    }
}

/// Live faces whose entry points at a vertex that is now inserted.
fn stale_faces(gains: &[Option<GainEntry>], st: &TmfgState) -> Vec<FaceId> {
    let stale = |(f, e): (usize, &Option<GainEntry>)| match e {
        Some(e) if st.is_inserted(e.vertex) => Some(f),
        _ => None,
    };
    if gains.len() >= PAR_SCAN_MIN {
        gains.par_iter().enumerate().filter_map(stale).collect()
    } else {
        gains.iter().enumerate().filter_map(stale).collect()
    }
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
