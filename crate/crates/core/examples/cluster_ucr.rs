//! Clusters a UCR dataset end to end and prints the run report.
//!
//! cargo run --release --example cluster_ucr -- [path/to/Name] [heap|corr|exact] [exact|hub]

use std::path::PathBuf;

use tdbht::pipeline::{InputFormat, ReportFormat};
use tdbht::{run_pipeline, PipelineConfig};

fn main() -> tdbht::Result<()> {
    let mut args = std::env::args().skip(1);
    let input = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/ucr/CBF"));
    let mut config = PipelineConfig::new(input, InputFormat::Ucr);
    if let Some(v) = args.next() {
        config.variant = v.parse()?;
    }
    if let Some(a) = args.next() {
        config.apsp = a.parse()?;
    }
    let report = run_pipeline(&config)?;
    print!("{}", report.render(ReportFormat::Text));
    Ok(())
}
