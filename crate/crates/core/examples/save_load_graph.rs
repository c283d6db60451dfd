//! Persists a similarity matrix and a TMFG, then reloads and checks both.
//!
//! cargo run --example save_load_graph -- [dir]

use std::path::PathBuf;

use tdbht::synthetic::uniform_similarity;
use tdbht::{build_tmfg_exact, load_matrix, BuildConfig, TmfgGraph};

fn main() -> tdbht::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("tdbht-example"));
    std::fs::create_dir_all(&dir).expect("create output directory");

    let s = uniform_similarity(64, 2);
    s.save_binary(dir.join("s.bin"))?;
    s.save_text(dir.join("s.txt"))?;
    assert_eq!(load_matrix(dir.join("s.bin"))?, s);

    let graph = build_tmfg_exact(&s, &BuildConfig::exact(4));
    graph.save(&dir, "tmfg")?;
    let back = TmfgGraph::load(dir.join("tmfg.edges"), dir.join("tmfg.trace"))?;
    assert_eq!(back, graph);
    println!(
        "wrote and reloaded {} edges and {} insertions under {}",
        back.edges().len(),
        back.insertions().len(),
        dir.display()
    );
    Ok(())
}
