//! Flag definitions. Every flag can also come from a `PROBEWALK_*`
//! environment variable; an explicit flag wins over the environment, which
//! wins over the built-in default.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "probewalk", version, about = "Biharmonic distance queries on undirected graphs")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Edge list (SNAP text) or binary cache written by `cache`.
    #[arg(long, global = true, env = "PROBEWALK_GRAPH")]
    pub graph: Option<PathBuf>,

    #[arg(long, global = true, env = "PROBEWALK_SEED", default_value_t = 1)]
    pub seed: u64,

    #[arg(long, global = true, env = "PROBEWALK_EPS", default_value_t = 0.1)]
    pub eps: f64,

    #[arg(long, global = true, env = "PROBEWALK_DELTA", default_value_t = 0.01)]
    pub delta: f64,

    /// Walk / series length. Overrides the length derived from λ.
    #[arg(long = "L", global = true, env = "PROBEWALK_L")]
    pub l: Option<usize>,

    #[arg(long = "L0", global = true, env = "PROBEWALK_L0", default_value_t = probewalk::estimator::DEFAULT_L0)]
    pub l0: usize,

    #[arg(long = "Lmax", global = true, env = "PROBEWALK_LMAX", default_value_t = probewalk::estimator::DEFAULT_LMAX)]
    pub lmax: usize,

    /// Mixing factor λ; skips the spectral estimate when given.
    #[arg(long, global = true, env = "PROBEWALK_LAMBDA")]
    pub lambda: Option<f64>,

    #[arg(long, global = true, env = "PROBEWALK_TOL", default_value_t = probewalk::spectral::DEFAULT_TOL)]
    pub tol: f64,

    #[arg(long, global = true, env = "PROBEWALK_MAX_ITER", default_value_t = probewalk::spectral::DEFAULT_MAX_ITER)]
    pub max_iter: usize,

    /// Worker threads. 1 keeps every query on a single thread.
    #[arg(long, global = true, env = "PROBEWALK_THREADS", default_value_t = 1)]
    pub threads: usize,

    /// Refuse queries whose predicted walk steps exceed this.
    #[arg(long, global = true, env = "PROBEWALK_MAX_STEPS", default_value_t = probewalk::estimator::DEFAULT_MAX_STEPS as f64)]
    pub max_steps: f64,

    #[arg(long, global = true, env = "PROBEWALK_DENSE_CAP", default_value_t = probewalk::baseline::DEFAULT_DENSE_CAP)]
    pub dense_cap: usize,

    /// Raise estimates below the degree lower bound to (1−ε)·bound.
    #[arg(long, global = true, env = "PROBEWALK_CLAMP")]
    pub clamp: bool,

    /// Run on disconnected or bipartite graphs, with warnings.
    #[arg(long, global = true, env = "PROBEWALK_ALLOW_BIPARTITE")]
    pub allow_bipartite: bool,

    /// Restrict the graph to its largest connected component after loading.
    #[arg(long, global = true, env = "PROBEWALK_LARGEST_COMPONENT")]
    pub largest_component: bool,

    /// Report every wall_ms as 0 so that reruns are byte-identical.
    #[arg(long, global = true, env = "PROBEWALK_NO_TIMING")]
    pub no_timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ingestion statistics, connectivity and bipartiteness.
    Validate,
    /// Estimate the mixing factor λ.
    Spectral,
    /// Dense exact β(s, t).
    Exact(Endpoints),
    /// Truncated-series β(s, t) after `--L` iterations (default 1000).
    Push(Endpoints),
    /// One query by any method.
    Query(QueryArgs),
    /// Accuracy/runtime benchmark over sampled pairs.
    Bench(BenchArgs),
    /// Minimum, maximum and mean β over sampled pairs.
    Table1(Table1Args),
    /// Write the graph as a binary cache.
    Cache(CacheArgs),
    /// Dump materialised probes (small n only).
    Probe(ProbeArgs),
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Endpoints {
    /// Source node (original id).
    #[arg(long)]
    pub s: u64,
    /// Target node (original id).
    #[arg(long)]
    pub t: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Push,
    Probewalk,
    Stabilized,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Push => "push",
            Method::Probewalk => "probewalk",
            Method::Stabilized => "stabilized",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroundTruth {
    #[value(name = "push-L1000")]
    PushL1000,
    Exact,
}

impl GroundTruth {
    pub fn name(self) -> &'static str {
        match self {
            GroundTruth::PushL1000 => "push-L1000",
            GroundTruth::Exact => "exact",
        }
    }
}

#[derive(Args, Debug)]
pub struct QueryArgs {
    #[command(flatten)]
    pub endpoints: Endpoints,
    #[arg(long, value_enum, env = "PROBEWALK_METHOD", default_value = "probewalk")]
    pub method: Method,
    /// Include the per-block means in the output.
    #[arg(long)]
    pub block_means: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, env = "PROBEWALK_PAIRS", default_value_t = 100)]
    pub pairs: usize,
    /// Comma-separated ε values.
    #[arg(long, value_delimiter = ',', env = "PROBEWALK_EPS_GRID", default_value = "0.02,0.04,0.06,0.1,0.2")]
    pub eps_grid: Vec<f64>,
    /// Comma-separated estimators to run.
    #[arg(long, value_enum, value_delimiter = ',', env = "PROBEWALK_METHOD", default_value = "probewalk")]
    pub method: Vec<Method>,
    #[arg(long, value_enum, env = "PROBEWALK_GROUND_TRUTH", default_value = "push-L1000")]
    pub ground_truth: GroundTruth,
    /// Dataset label for the report (defaults to the graph file stem).
    #[arg(long)]
    pub dataset: Option<String>,
    /// Also write the rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Table1Args {
    #[arg(long, env = "PROBEWALK_PAIRS", default_value_t = 100)]
    pub pairs: usize,
    #[arg(long, value_enum, default_value = "push-L1000")]
    pub method: GroundTruth,
    #[arg(long)]
    pub dataset: Option<String>,
}

#[derive(Args, Debug)]
pub struct CacheArgs {
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    /// Dimension; defaults to the node count of `--graph`.
    #[arg(long)]
    pub n: Option<u64>,
    /// First probe index.
    #[arg(long, default_value_t = 0)]
    pub k: u64,
    #[arg(long, default_value_t = 1)]
    pub count: u64,
}
