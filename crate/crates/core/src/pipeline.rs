//! End-to-end runs with per-stage timings.
//!
//! Stages: load, similarity, initial faces, sorting, TMFG insertion, APSP,
//! DBHT, linkage, output. Each stage's error is tagged with its name.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::apsp::{to_weighted, ApspMode, ApspParams, DistanceOracle};
use crate::dbht;
use crate::error::{Error, Result};
use crate::eval;
use crate::linkage::Dendrogram;
use crate::simmatrix::{
    load_matrix, load_ucr_dataset, load_ucr_splits, pearson_similarity, sort_neighbor_lists,
    SimilarityMatrix,
};
use crate::tmfg::{self, BuildConfig, TmfgGraph, Variant};

/// Environment variable read when no worker count is configured.
pub const WORKERS_ENV: &str = "TDBHT_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Ucr,
    Matrix,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ucr" => Ok(InputFormat::Ucr),
            "matrix" => Ok(InputFormat::Matrix),
            other => Err(Error::Config(format!(
                "unknown input format `{other}` (expected ucr or matrix)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(Error::Config(format!(
                "unknown report format `{other}` (expected json or text)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub variant: Variant,
    pub prefix_size: usize,
    pub apsp: ApspMode,
    /// Hub mode only; defaults to `ceil(sqrt(n))`.
    pub hub_count: Option<usize>,
    /// Hub mode only; defaults to 2.
    pub radius_factor: Option<f64>,
    /// Defaults to the environment override, then the hardware parallelism.
    pub workers: Option<usize>,
    /// Defaults to the number of classes in a labelled input.
    pub k: Option<usize>,
    /// Directory for dendrogram, labels and report; nothing is written when
    /// unset.
    pub out: Option<PathBuf>,
    pub report: ReportFormat,
}

impl PipelineConfig {
    /// Heap variant, exact APSP, everything else defaulted.
    pub fn new(input: impl Into<PathBuf>, format: InputFormat) -> Self {
        PipelineConfig {
            input: input.into(),
            format,
            variant: Variant::Heap,
            prefix_size: 1,
            apsp: ApspMode::Exact,
            hub_count: None,
            radius_factor: None,
            workers: None,
            k: None,
            out: None,
            report: ReportFormat::Json,
        }
    }

    /// Checks flag combinations that are wrong regardless of the input.
    pub fn validate(&self) -> Result<()> {
        if self.prefix_size == 0 {
            return Err(Error::Config("prefix size must be at least 1".into()));
        }
        if self.apsp == ApspMode::Exact && (self.hub_count.is_some() || self.radius_factor.is_some())
        {
            return Err(Error::Config(
                "hub count and radius factor only apply to hub APSP".into(),
            ));
        }
        if self.hub_count == Some(0) {
            return Err(Error::Config("hub count must be at least 1".into()));
        }
        if let Some(c) = self.radius_factor {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Config(format!("radius factor {c} must be positive")));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        if self.k == Some(0) {
            return Err(Error::Config("cluster count must be at least 1".into()));
        }
        Ok(())
    }

    /// Worker count after applying the environment override and hardware
    /// default.
    pub fn resolved_workers(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w);
        }
        match std::env::var(WORKERS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(w) if w > 0 => Ok(w),
                _ => Err(Error::Config(format!("{WORKERS_ENV}=`{v}` is not a positive integer"))),
            },
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    fn apsp_params(&self, n: usize) -> ApspParams {
        let d = ApspParams::default_for(n);
        ApspParams {
            hub_count: self.hub_count.unwrap_or(d.hub_count),
            radius_factor: self.radius_factor.unwrap_or(d.radius_factor),
        }
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub load: f64,
    pub similarity: f64,
    pub initial_faces: f64,
    pub sorting: f64,
    pub tmfg_insertion: f64,
    pub apsp: f64,
    pub dbht: f64,
    pub linkage: f64,
    pub output: f64,
    pub total: f64,
}

impl StageTimings {
    pub fn stage_sum(&self) -> f64 {
        self.load
            + self.similarity
            + self.initial_faces
            + self.sorting
            + self.tmfg_insertion
            + self.apsp
            + self.dbht
            + self.linkage
            + self.output
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: PathBuf,
    pub format: InputFormat,
    pub variant: Variant,
    pub prefix_size: usize,
    pub apsp: ApspMode,
    pub hub_count: Option<usize>,
    pub radius_factor: Option<f64>,
    pub workers: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub n: usize,
    pub timings: StageTimings,
    pub edge_sum: f64,
    /// Percent edge sum lost against the exact `p = 1` builder, when compared.
    pub edge_sum_delta: Option<f64>,
    /// Agreement with the input labels, when it has any.
    pub ari: Option<f64>,
    pub converging_bubbles: usize,
    pub clusters: usize,
    /// SHA-256 of the dendrogram text.
    pub digest: String,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let t = &self.timings;
        let mut s = String::new();
        let _ = writeln!(s, "input           {}", c.input.display());
        let _ = writeln!(s, "variant         {} (prefix {})", c.variant, c.prefix_size);
        let _ = writeln!(s, "apsp            {}", c.apsp);
        let _ = writeln!(s, "workers         {}", c.workers);
        let _ = writeln!(s, "n               {}", self.n);
        let _ = writeln!(s, "k               {}", c.k);
        let _ = writeln!(s, "edge sum        {}", self.edge_sum);
        if let Some(d) = self.edge_sum_delta {
            let _ = writeln!(s, "edge sum delta  {d:.4}%");
        }
        if let Some(a) = self.ari {
            let _ = writeln!(s, "ari             {a:.4}");
        }
        let _ = writeln!(s, "converging      {}", self.converging_bubbles);
        let _ = writeln!(s, "digest          {}", self.digest);
        for (name, v) in [
            ("load", t.load),
            ("similarity", t.similarity),
            ("initial faces", t.initial_faces),
            ("sorting", t.sorting),
            ("tmfg insertion", t.tmfg_insertion),
            ("apsp", t.apsp),
            ("dbht", t.dbht),
            ("linkage", t.linkage),
            ("output", t.output),
            ("total", t.total),
        ] {
            let _ = writeln!(s, "time {name:<15} {v:.6}s");
        }
        s
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Text => self.to_text(),
        }
    }
}

/// Everything one run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub graph: TmfgGraph,
    pub dendrogram: Dendrogram,
    pub labels: Vec<usize>,
}

/// An input ready for the graph stages.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub similarity: SimilarityMatrix,
    pub labels: Option<Vec<usize>>,
    pub load: Duration,
    pub similarity_time: Duration,
}

impl LoadedInput {
    pub fn from_matrix(similarity: SimilarityMatrix, labels: Option<Vec<usize>>) -> Self {
        LoadedInput {
            similarity,
            labels,
            load: Duration::ZERO,
            similarity_time: Duration::ZERO,
        }
    }
}

/// Reads a UCR input. `path` may be a single file, a directory `.../Name`
/// holding `Name_TRAIN.tsv` and `Name_TEST.tsv`, or the common prefix
/// `.../Name` of those two files.
pub fn load_ucr_input(path: &Path) -> Result<crate::simmatrix::Dataset> {
    if path.is_file() {
        return load_ucr_dataset(path);
    }
    let name = path
        .file_name()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Config(format!("cannot name a dataset from {}", path.display())))?;
    if path.is_dir() {
        return load_ucr_splits(path, name);
    }
    let parent = path.parent().unwrap_or(Path::new("."));
    load_ucr_splits(parent, name)
}

pub fn load_input(config: &PipelineConfig) -> Result<LoadedInput> {
    let start = Instant::now();
    match config.format {
        InputFormat::Matrix => {
            let s = load_matrix(&config.input).map_err(|e| e.in_stage("load"))?;
            Ok(LoadedInput {
                similarity: s,
                labels: None,
                load: start.elapsed(),
                similarity_time: Duration::ZERO,
            })
        }
        InputFormat::Ucr => {
            let data = load_ucr_input(&config.input).map_err(|e| e.in_stage("load"))?;
            let load = start.elapsed();
            let start = Instant::now();
            let s = pearson_similarity(&data);
            Ok(LoadedInput {
                similarity: s,
                labels: Some(data.labels().to_vec()),
                load,
                similarity_time: start.elapsed(),
            })
        }
    }
}

/// Loads the configured input and runs every stage.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport> {
    config.validate()?;
    let workers = config.resolved_workers()?;
    let started = Instant::now();
    let out = with_workers(workers, || {
        let input = load_input(config)?;
        run_stages(config, &input, workers, started)
    })?;
    Ok(out.report)
}

/// Runs the graph stages on an already loaded input. Load and similarity
/// timings are taken from `input`.
pub fn run_loaded(config: &PipelineConfig, input: &LoadedInput) -> Result<RunOutput> {
    config.validate()?;
    let workers = config.resolved_workers()?;
    let now = Instant::now();
    let started = now
        .checked_sub(input.load + input.similarity_time)
        .unwrap_or(now);
    with_workers(workers, || run_stages(config, input, workers, started))
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(f)
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn run_stages(
    config: &PipelineConfig,
    input: &LoadedInput,
    workers: usize,
    started: Instant,
) -> Result<RunOutput> {
    let s = &input.similarity;
    let n = s.size();
    let k = match (config.k, &input.labels) {
        (Some(k), _) => k,
        (None, Some(labels)) => labels.iter().max().map_or(1, |m| m + 1),
        (None, None) => {
            return Err(Error::Config(
                "a cluster count is required for unlabelled input".into(),
            ))
        }
    };
    if k > n {
        return Err(Error::ClusterCountOutOfRange { k, n });
    }
    let params = config.apsp_params(n);
    if config.apsp == ApspMode::Hub {
        params.validate(n)?;
    }
    let mut t = StageTimings {
        load: secs(input.load),
        similarity: secs(input.similarity_time),
        ..StageTimings::default()
    };

    let clock = Instant::now();
    let lists = config.variant.needs_sorted_lists().then(|| sort_neighbor_lists(s));
    t.sorting = secs(clock.elapsed());

    let build = BuildConfig::new(config.variant, config.prefix_size)?;
    let built = tmfg::build(s, lists.as_ref(), &build).map_err(|e| e.in_stage("tmfg"))?;
    drop(lists);
    t.initial_faces = secs(built.initial_faces);
    t.tmfg_insertion = secs(built.insertion);
    let graph = built.graph;

    let clock = Instant::now();
    let oracle = DistanceOracle::build(&to_weighted(&graph, s), config.apsp, &params)
        .map_err(|e| e.in_stage("apsp"))?;
    t.apsp = secs(clock.elapsed());

    let clock = Instant::now();
    let dtree = dbht::orient_edges(
        dbht::build_bubble_tree(&graph).map_err(|e| e.in_stage("dbht"))?,
        s,
    );
    let converging = dbht::converging_bubbles(&dtree).len();
    let assignment = dbht::assign_vertices(&dtree, s, &oracle);
    t.dbht = secs(clock.elapsed());

    let clock = Instant::now();
    let dendrogram = dbht::build_hierarchy(&assignment, &oracle);
    let labels = dendrogram.cut(k).map_err(|e| e.in_stage("linkage"))?;
    t.linkage = secs(clock.elapsed());
    drop(oracle);

    let ari = match &input.labels {
        Some(truth) => Some(eval::ari(truth, &labels).map_err(|e| e.in_stage("evaluation"))?),
        None => None,
    };
    let dendrogram_text = dendrogram.to_text();
    let mut report = RunReport {
        config: ConfigEcho {
            input: config.input.clone(),
            format: config.format,
            variant: config.variant,
            prefix_size: config.prefix_size,
            apsp: config.apsp,
            hub_count: (config.apsp == ApspMode::Hub).then_some(params.hub_count),
            radius_factor: (config.apsp == ApspMode::Hub).then_some(params.radius_factor),
            workers,
            k,
        },
        n,
        timings: t,
        edge_sum: tmfg::edge_sum(&graph, s),
        edge_sum_delta: None,
        ari,
        converging_bubbles: converging,
        clusters: assignment.group_count(),
        digest: digest(&dendrogram_text),
    };

    match &config.out {
        Some(dir) => write_outputs(dir, &dendrogram_text, &labels, &mut report, config.report, started)
            .map_err(|e| e.in_stage("output"))?,
        None => report.timings.total = secs(started.elapsed()),
    }

    Ok(RunOutput {
        report,
        graph,
        dendrogram,
        labels,
    })
}

/// Hex SHA-256 of a dendrogram's text form.
pub fn digest(dendrogram_text: &str) -> String {
    hex::encode(Sha256::digest(dendrogram_text.as_bytes()))
}

pub const DENDROGRAM_FILE: &str = "dendrogram.txt";
pub const LABELS_FILE: &str = "labels.txt";

pub fn report_file(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Json => "report.json",
        ReportFormat::Text => "report.txt",
    }
}

/// Writes dendrogram, labels and report (with the final timings); on any
/// failure, removes whichever files were already written.
fn write_outputs(
    dir: &Path,
    dendrogram: &str,
    labels: &[usize],
    report: &mut RunReport,
    format: ReportFormat,
    started: Instant,
) -> Result<()> {
    let clock = Instant::now();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written: Vec<PathBuf> = Vec::with_capacity(3);
    let mut write = |name: &str, body: &str| -> Result<()> {
        let path = dir.join(name);
        let result = fs::write(&path, body).map_err(|e| Error::io(&path, e));
        if result.is_ok() {
            written.push(path);
        } else {
            for done in &written {
                let _ = fs::remove_file(done);
            }
        }
        result
    };
    write(DENDROGRAM_FILE, dendrogram)?;
    let mut label_text = String::with_capacity(labels.len() * 3);
    for l in labels {
        let _ = writeln!(label_text, "{l}");
    }
    write(LABELS_FILE, &label_text)?;
    report.timings.output = secs(clock.elapsed());
    report.timings.total = secs(started.elapsed());
    write(report_file(format), &report.render(format))
}

/// A builder choice for comparisons, written `exact:200`, `corr`, `heap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub variant: Variant,
    pub prefix_size: usize,
}

impl VariantSpec {
    pub fn label(&self) -> String {
        match self.variant {
            Variant::Heap => "heap".into(),
            v => format!("{v}:{}", self.prefix_size),
        }
    }
}

impl FromStr for VariantSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, prefix) = match s.split_once(':') {
            Some((name, p)) => {
                let p = p
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad prefix size in `{s}`")))?;
                (name, p)
            }
            None => (s, 1),
        };
        let variant: Variant = name.parse()?;
        BuildConfig::new(variant, prefix)?;
        Ok(VariantSpec {
            variant,
            prefix_size: prefix,
        })
    }
}

/// Parses a comma-separated variant list.
pub fn parse_variant_list(s: &str) -> Result<Vec<VariantSpec>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub baseline_edge_sum: f64,
    pub reports: Vec<RunReport>,
}

impl Comparison {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>14} {:>10} {:>8} {:>10}",
            "variant", "edge sum", "delta %", "ari", "tmfg s"
        );
        for r in &self.reports {
            let spec = VariantSpec {
                variant: r.config.variant,
                prefix_size: r.config.prefix_size,
            };
            let ari = r.ari.map_or("-".to_string(), |a| format!("{a:.4}"));
            let _ = writeln!(
                s,
                "{:<12} {:>14.6} {:>10.4} {:>8} {:>10.4}",
                spec.label(),
                r.edge_sum,
                r.edge_sum_delta.unwrap_or(f64::NAN),
                ari,
                r.timings.initial_faces + r.timings.sorting + r.timings.tmfg_insertion
            );
        }
        s
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => serde_json::to_string_pretty(self).expect("comparison serializes"),
            ReportFormat::Text => self.to_text(),
        }
    }
}

/// Runs each variant on the same input and reports its edge sum loss
/// against the exact `p = 1` builder. With an output directory, each run
/// writes into a subdirectory named after its variant.
pub fn compare_variants(config: &PipelineConfig, variants: &[VariantSpec]) -> Result<Comparison> {
    if variants.len() < 2 {
        return Err(Error::Config(format!(
            "comparison needs at least two variants, got {}",
            variants.len()
        )));
    }
    config.validate()?;
    let workers = config.resolved_workers()?;
    let input = with_workers(workers, || load_input(config))?;
    compare_loaded(config, &input, variants)
}

/// [`compare_variants`] on an already loaded input.
pub fn compare_loaded(
    config: &PipelineConfig,
    input: &LoadedInput,
    variants: &[VariantSpec],
) -> Result<Comparison> {
    if variants.len() < 2 {
        return Err(Error::Config(format!(
            "comparison needs at least two variants, got {}",
            variants.len()
        )));
    }
    let mut reports = Vec::with_capacity(variants.len());
    for spec in variants {
        let mut cfg = config.clone();
        cfg.variant = spec.variant;
        cfg.prefix_size = spec.prefix_size;
        cfg.out = config
            .out
            .as_ref()
            .map(|d| d.join(spec.label().replace(':', "-")));
        reports.push(run_loaded(&cfg, input)?.report);
    }
    let baseline = VariantSpec {
        variant: Variant::Exact,
        prefix_size: 1,
    };
    let baseline_edge_sum = match variants.iter().position(|v| *v == baseline) {
        Some(i) => reports[i].edge_sum,
        None => {
            let workers = config.resolved_workers()?;
            with_workers(workers, || {
                let g = tmfg::build(&input.similarity, None, &BuildConfig::exact(1))?.graph;
                Ok(tmfg::edge_sum(&g, &input.similarity))
            })?
        }
    };
    for r in &mut reports {
        r.edge_sum_delta = Some(eval::percent_reduction(r.edge_sum, baseline_edge_sum)?);
    }
    Ok(Comparison {
        baseline_edge_sum,
        reports,
    })
}
