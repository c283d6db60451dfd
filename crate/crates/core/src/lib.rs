//! Filtered-graph hierarchical clustering for similarity matrices.
//!
//! The pipeline turns a dataset into a Pearson similarity matrix, builds a
//! triangulated maximally filtered graph (TMFG) over it, measures shortest
//! paths on that graph, and clusters with a directed bubble hierarchy tree
//! (DBHT). Each stage is usable on its own; [`pipeline`] strings them
//! together with timings.

pub mod apsp;
pub mod dbht;
pub mod error;
pub mod eval;
pub mod linkage;
pub mod pipeline;
pub mod simmatrix;
pub mod synthetic;
pub mod tmfg;

pub use error::{Error, Result};
pub use simmatrix::{
    load_matrix, load_ucr_dataset, load_ucr_splits, pearson_similarity, sort_neighbor_lists,
    Dataset, SimilarityMatrix, SortedNeighborLists,
};
pub use tmfg::{
    build_tmfg_corr, build_tmfg_exact, build_tmfg_heap, edge_sum, select_initial_clique,
    BuildConfig, TmfgGraph, Variant,
};
pub use apsp::{apsp_exact, apsp_hub, to_weighted, ApspMode, ApspParams, DistanceOracle};
pub use dbht::{dbht, Dbht};
pub use eval::{ari, edge_sum_delta};
pub use linkage::{complete_linkage, Dendrogram};
pub use pipeline::{compare_variants, run_pipeline, PipelineConfig, RunReport};
