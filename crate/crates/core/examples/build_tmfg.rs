//! Builds a TMFG with each builder and compares edge sums and build times.
//!
//! cargo run --release --example build_tmfg -- [n] [seed]

use std::time::Instant;

use tdbht::synthetic::random_similarity;
use tdbht::tmfg::build;
use tdbht::{edge_sum, edge_sum_delta, sort_neighbor_lists, BuildConfig};

fn main() -> tdbht::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1000, |a| a.parse().expect("n"));
    let seed: u64 = args.next().map_or(0, |a| a.parse().expect("seed"));
    let s = random_similarity(n, seed);

    let start = Instant::now();
    let lists = sort_neighbor_lists(&s);
    println!("sorted {n} neighbor lists in {:.3}s", start.elapsed().as_secs_f64());

    let reference = build(&s, None, &BuildConfig::exact(1))?;
    println!("{:<10} {:>14} {:>9} {:>10}", "builder", "edge sum", "loss %", "seconds");
    for config in [
        BuildConfig::exact(1),
        BuildConfig::exact(50),
        BuildConfig::corr(1),
        BuildConfig::corr(50),
        BuildConfig::heap(),
    ] {
        let out = build(&s, Some(&lists), &config)?;
        out.graph.validate()?;
        println!(
            "{:<10} {:>14.4} {:>9.3} {:>10.3}",
            format!("{}:{}", config.variant, config.prefix_size),
            edge_sum(&out.graph, &s),
            edge_sum_delta(&out.graph, &reference.graph, &s)?,
            (out.initial_faces + out.insertion).as_secs_f64(),
        );
    }
    Ok(())
}
