use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use tdbht::apsp::ApspMode;
use tdbht::pipeline::{
    compare_variants, parse_variant_list, report_file, run_pipeline, InputFormat, PipelineConfig,
    ReportFormat,
};
use tdbht::Variant;

/// Cluster a dataset or similarity matrix with TMFG + DBHT.
#[derive(Debug, Parser)]
#[command(name = "tdbht", version)]
struct Args {
    /// UCR file, UCR dataset prefix (`dir/Name`), or similarity matrix file
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "ucr")]
    format: InputFormat,
    #[arg(long, default_value = "heap")]
    variant: Variant,
    /// Face-vertex pairs inserted per round (exact and corr builders)
    #[arg(long, default_value_t = 1)]
    prefix: usize,
    #[arg(long, default_value = "exact")]
    apsp: ApspMode,
    /// Hub count for hub APSP [default: ceil(sqrt(n))]
    #[arg(long)]
    hubs: Option<usize>,
    /// Radius multiplier for hub APSP [default: 2]
    #[arg(long)]
    radius_factor: Option<f64>,
    /// Cluster count [default: number of classes in the input]
    #[arg(long)]
    k: Option<usize>,
    /// Worker threads [default: $TDBHT_WORKERS, else all cores]
    #[arg(long)]
    workers: Option<usize>,
    /// Directory for dendrogram.txt, labels.txt and the report
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    report: ReportFormat,
    /// Comma-separated variants to compare instead of a single run, e.g.
    /// `exact:1,exact:200,heap`
    #[arg(long)]
    compare: Option<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = PipelineConfig {
        input: args.input,
        format: args.format,
        variant: args.variant,
        prefix_size: args.prefix,
        apsp: args.apsp,
        hub_count: args.hubs,
        radius_factor: args.radius_factor,
        workers: args.workers,
        k: args.k,
        out: args.out,
        report: args.report,
    };
    let result = match &args.compare {
        Some(list) => parse_variant_list(list)
            .and_then(|variants| compare_variants(&config, &variants))
            .map(|c| c.render(config.report)),
        None => run_pipeline(&config).map(|r| r.render(config.report)),
    };
    match result {
        Ok(text) => {
            println!("{}", text.trim_end());
            if let (Some(dir), None) = (&config.out, &args.compare) {
                eprintln!("wrote {}", dir.join(report_file(config.report)).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
