//! Complete linkage over points in the plane with any distance function.
//!
//! cargo run --example complete_linkage

use tdbht::linkage::complete_linkage;

fn main() -> tdbht::Result<()> {
    let points: [(f64, f64); 7] = [
        (0.0, 0.0),
        (0.3, 0.1),
        (0.1, 0.4),
        (5.0, 5.0),
        (5.2, 4.7),
        (9.0, 0.5),
        (9.4, 0.0),
    ];
    let ids: Vec<usize> = (0..points.len()).collect();
    let dendrogram = complete_linkage(&ids, |a, b| {
        let (p, q) = (points[a], points[b]);
        ((p.0 - q.0) * (p.0 - q.0) + (p.1 - q.1) * (p.1 - q.1)).sqrt()
    });
    print!("{}", dendrogram.to_text());
    for k in 1..=4 {
        println!("k={k}: {:?}", dendrogram.cut(k)?);
    }
    Ok(())
}
