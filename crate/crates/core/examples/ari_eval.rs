//! Adjusted Rand index on a few hand-made labelings.
//!
//! cargo run --example ari_eval

use tdbht::eval::ContingencyTable;
use tdbht::ari;

fn main() -> tdbht::Result<()> {
    let truth = [0, 0, 0, 1, 1, 1, 2, 2, 2];
    let cases: [(&str, [usize; 9]); 4] = [
        ("identical", truth),
        ("renamed", [7, 7, 7, 3, 3, 3, 5, 5, 5]),
        ("one moved", [0, 0, 1, 1, 1, 1, 2, 2, 2]),
        ("interleaved", [0, 1, 2, 0, 1, 2, 0, 1, 2]),
    ];
    for (name, predicted) in cases {
        println!("{name:<12} {:>7.4}", ari(&truth, &predicted)?);
    }
    let table = ContingencyTable::new(&truth, &cases[2].1)?;
    println!("row sums {:?}, column sums {:?}", table.row_sums(), table.col_sums());
    Ok(())
}
