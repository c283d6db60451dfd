//! Exact versus hub-approximated shortest paths on a TMFG.
//!
//! cargo run --release --example hub_apsp -- [n] [hubs] [radius_factor]

use std::time::Instant;

use tdbht::synthetic::random_similarity;
use tdbht::{
    apsp_exact, apsp_hub, build_tmfg_heap, sort_neighbor_lists, to_weighted, ApspParams,
    BuildConfig,
};

fn main() -> tdbht::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(2000, |a| a.parse().expect("n"));
    let mut params = ApspParams::default_for(n);
    if let Some(h) = args.next() {
        params.hub_count = h.parse().expect("hub count");
    }
    if let Some(c) = args.next() {
        params.radius_factor = c.parse().expect("radius factor");
    }
    let s = random_similarity(n, 1);
    let graph = build_tmfg_heap(&s, &sort_neighbor_lists(&s), &BuildConfig::heap());
    let g = to_weighted(&graph, &s);

    let start = Instant::now();
    let exact = apsp_exact(&g);
    let exact_time = start.elapsed();
    let start = Instant::now();
    let hub = apsp_hub(&g, &params)?;
    let hub_time = start.elapsed();

    let (mut worst, mut total, mut hits) = (0.0f64, 0.0, 0usize);
    for u in 0..n {
        for v in u + 1..n {
            let (d, h) = (exact.query(u, v), hub.query(u, v));
            let rel = (h - d) / d;
            worst = worst.max(rel);
            total += rel;
            hits += (rel < 1e-12) as usize;
        }
    }
    let pairs = n * (n - 1) / 2;
    println!("n={n} hubs={} radius factor={}", params.hub_count, params.radius_factor);
    println!("exact {:.3}s, hub {:.3}s", exact_time.as_secs_f64(), hub_time.as_secs_f64());
    println!(
        "hub distances exact on {:.1}% of pairs, mean overestimate {:.3}%, worst {:.1}%",
        100.0 * hits as f64 / pairs as f64,
        100.0 * total / pairs as f64,
        100.0 * worst
    );
    Ok(())
}
