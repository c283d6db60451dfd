//! Walks through the DBHT stages on a labelled synthetic dataset.
//!
//! cargo run --release --example dbht_hierarchy -- [n] [classes]

use tdbht::dbht::{assign_vertices, build_bubble_tree, build_hierarchy, converging_bubbles, orient_edges};
use tdbht::synthetic::latent_factor_dataset;
use tdbht::{
    apsp_exact, ari, build_tmfg_heap, pearson_similarity, sort_neighbor_lists, to_weighted,
    BuildConfig,
};

fn main() -> tdbht::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(600, |a| a.parse().expect("n"));
    let classes: usize = args.next().map_or(4, |a| a.parse().expect("classes"));
    let data = latent_factor_dataset(n, classes, 80, 3);
    let s = pearson_similarity(&data);
    let graph = build_tmfg_heap(&s, &sort_neighbor_lists(&s), &BuildConfig::heap());
    let oracle = apsp_exact(&to_weighted(&graph, &s));

    let tree = orient_edges(build_bubble_tree(&graph)?, &s);
    let sinks = converging_bubbles(&tree);
    println!("{} bubbles, {} converging", tree.tree().len(), sinks.len());

    let assignment = assign_vertices(&tree, &s, &oracle);
    let groups = assignment.group_count();
    println!("{groups} nonempty converging groups");

    let dendrogram = build_hierarchy(&assignment, &oracle);
    assert_eq!(dendrogram.cut(groups)?, assignment.partition());
    for k in [classes, 2 * classes, groups] {
        let labels = dendrogram.cut(k)?;
        println!("k={k:<4} ARI {:.4}", ari(data.labels(), &labels)?);
    }
    Ok(())
}
