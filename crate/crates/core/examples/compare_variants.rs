//! Runs several builders on the same input and reports each one's edge-sum
//! loss against the exact single-insertion builder.
//!
//! cargo run --release --example compare_variants -- [n]

use tdbht::pipeline::{compare_loaded, parse_variant_list, InputFormat, LoadedInput, ReportFormat};
use tdbht::synthetic::latent_factor_dataset;
use tdbht::{pearson_similarity, PipelineConfig};

fn main() -> tdbht::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(800, |a| a.parse().expect("n"));
    let data = latent_factor_dataset(n, 5, 64, 7);
    let input = LoadedInput::from_matrix(pearson_similarity(&data), Some(data.labels().to_vec()));
    let config = PipelineConfig::new("latent-factor", InputFormat::Matrix);
    let variants = parse_variant_list("exact:1,exact:10,exact:100,corr,heap")?;
    let table = compare_loaded(&config, &input, &variants)?;
    print!("{}", table.render(ReportFormat::Text));
    Ok(())
}
