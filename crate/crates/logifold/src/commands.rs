//! The `compile`, `combine` and `theory` subcommands as library calls.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, ValueEnum};
use logifold_core::graph::DiscoveryMode;
use logifold_core::lp::Bounds;
use logifold_core::theory::{theory_report, SearchConfig, SearchMode};
use logifold_core::{
    compile_mlp, compile_mlp_fuzzy, Chart, Discovery, EnsembleError, GlobalLabelSpace, Head, Logifold, ThresholdLadder,
};

use crate::error::{Error, Result};
use crate::io::{self, GraphFile};
use crate::table::{evaluate_parallel, format_tsv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompileMode {
    Auto,
    Exhaustive,
    Sampling,
}

#[derive(Debug, Clone, Args)]
pub struct CompileArgs {
    /// Weight file (JSON).
    pub mlp: PathBuf,
    /// Where to write the serialized graph.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Restrict chambers to the box `[lo, hi]^n`, given as `lo,hi`.
    #[arg(long, value_parser = parse_bounds)]
    pub domain: Option<Bounds>,
    #[arg(long, value_enum, default_value_t = CompileMode::Auto)]
    pub mode: CompileMode,
    /// Sample count for sampling discovery.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Widest layer still enumerated exhaustively in auto mode.
    #[arg(long, default_value_t = 12)]
    pub width_cap: usize,
    /// Maximum number of graph vertices.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
}

fn parse_bounds(s: &str) -> std::result::Result<Bounds, String> {
    let (lo, hi) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad bound `{hi}`"))?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err("need lo <= hi".into());
    }
    Ok(Bounds { lo, hi })
}

/// Compiles the network and returns the summary printed to stdout.
pub fn compile(args: &CompileArgs) -> Result<String> {
    let mlp = io::load_mlp(&args.mlp)?;
    let mut discovery = Discovery {
        mode: match args.mode {
            CompileMode::Auto => DiscoveryMode::Auto,
            CompileMode::Exhaustive => DiscoveryMode::Exhaustive,
            CompileMode::Sampling => DiscoveryMode::Sampling,
        },
        width_cap: args.width_cap,
        samples: args.samples,
        seed: args.seed,
        domain: args.domain,
        max_vertices: args.budget,
        ..Discovery::default()
    };
    if let Some(domain) = args.domain {
        discovery.sampling_box = domain;
    }
    let (file, vertices, arrows, layers) = match mlp.head() {
        Head::IndexMax => {
            let graph = compile_mlp(&mlp, &discovery)?;
            let summary = (graph.vertices().len(), graph.arrows().len(), graph.layer_sizes());
            (GraphFile::Crisp { seed: args.seed, graph }, summary.0, summary.1, summary.2)
        }
        Head::Softmax => {
            let graph = compile_mlp_fuzzy(&mlp, &discovery)?;
            let mut layers = Vec::new();
            for v in graph.vertices().iter().filter(|v| !v.sink) {
                let l = v.layer as usize;
                if layers.len() <= l {
                    layers.resize(l + 1, 0);
                }
                layers[l] += 1;
            }
            let summary = (graph.vertices().len(), graph.arrows().len(), layers);
            (GraphFile::Fuzzy { seed: args.seed, graph }, summary.0, summary.1, summary.2)
        }
    };
    if let Some(out) = &args.out {
        io::write_text(out, &io::format_graph(&file))?;
    }
    let kind = match file {
        GraphFile::Crisp { .. } => "crisp",
        GraphFile::Fuzzy { .. } => "fuzzy",
    };
    let layer_list = layers.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    Ok(format!(
        "seed={}\nkind={kind}\nvertices={vertices}\narrows={arrows}\nchambers_per_layer={layer_list}\nfirst_layer_chambers={}\n",
        args.seed,
        layers.get(1).copied().unwrap_or(0),
    ))
}

#[derive(Debug, Clone, Args)]
pub struct CombineArgs {
    /// Prediction files, one per chart.
    #[arg(required = true)]
    pub predictions: Vec<PathBuf>,
    /// Ground truth (`instance_id,label` lines); fixes the instance order.
    #[arg(long)]
    pub truth: PathBuf,
    /// Comma-separated thresholds starting at 0. Defaults to 0 and σ(k/2), k = 0..=20.
    #[arg(long)]
    pub ladder: Option<String>,
    /// Routing file: `filter=<model_id>` and `<coarse label>=<expert model_id>` lines.
    #[arg(long)]
    pub routing: Option<PathBuf>,
    /// Where to write the table; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Recorded for reproducibility; combining is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn parse_ladder(s: &str) -> Result<ThresholdLadder> {
    let values = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Usage(format!("bad threshold `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdLadder::new(values)?)
}

/// Builds the logifold from files. Returns it with the truth labels as
/// global indices.
pub fn build_logifold(
    predictions: &[PathBuf],
    truth: &Path,
    ladder: ThresholdLadder,
    routing: Option<&Path>,
) -> Result<(Logifold, Vec<usize>)> {
    let truth = io::load_truth(truth)?;
    let matrices = predictions.iter().map(|p| io::load_predictions(p).map(Arc::new)).collect::<Result<Vec<_>>>()?;
    let charts = matrices
        .iter()
        .map(|m| Chart::from_matrix(m.clone(), truth.instance_ids()))
        .collect::<Result<Vec<_>, EnsembleError>>()?;
    let vocabs: Vec<&[String]> = matrices.iter().map(|m| &m.vocab()[..]).collect();
    let global = GlobalLabelSpace::union(&vocabs)?;
    let mut lf = Logifold::new(charts, global, ladder)?;
    if let Some(path) = routing {
        let spec = io::load_routing(path)?;
        lf = lf.specialize_routing(&spec.filter, &spec.experts)?;
    }
    let labels = lf.truth_indices(truth.labels())?;
    Ok((lf, labels))
}

/// Evaluates the logifold and returns the TSV table.
pub fn combine(args: &CombineArgs) -> Result<String> {
    let ladder = args.ladder.as_deref().map(parse_ladder).transpose()?.unwrap_or_default();
    let (lf, truth) = build_logifold(&args.predictions, &args.truth, ladder, args.routing.as_deref())?;
    let table = format_tsv(&evaluate_parallel(&lf, &truth)?);
    if let Some(out) = &args.out {
        io::write_text(out, &table)?;
    }
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryMode {
    Auto,
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct TheoryArgs {
    /// Size budget N: discontinuities per member.
    #[arg(short = 'n', long = "size", default_value_t = 1)]
    pub n: usize,
    /// Family size K.
    #[arg(short = 'k', long = "members", default_value_t = 4)]
    pub k: usize,
    /// Breakpoints searched: 2^-1 … 2^-depth.
    #[arg(long, default_value_t = 8)]
    pub depth: u32,
    /// Largest candidate count for exhaustive search.
    #[arg(long, default_value_t = 1 << 20)]
    pub budget: u64,
    #[arg(long, value_enum, default_value_t = TheoryMode::Auto)]
    pub mode: TheoryMode,
    #[arg(long, default_value_t = 32)]
    pub restarts: u32,
    /// Random consistent families run through the proof checks.
    #[arg(long, default_value_t = 200)]
    pub families: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn theory(args: &TheoryArgs) -> Result<String> {
    let config = SearchConfig {
        depth: args.depth,
        mode: match args.mode {
            TheoryMode::Auto => SearchMode::Auto,
            TheoryMode::Exhaustive => SearchMode::Exhaustive,
            TheoryMode::Random => SearchMode::Random,
        },
        budget: args.budget,
        restarts: args.restarts,
        seed: args.seed,
    };
    let report = theory_report(args.k, args.n, args.families, &config)?.to_string();
    if let Some(out) = &args.out {
        io::write_text(out, &report)?;
    }
    Ok(report)
}
