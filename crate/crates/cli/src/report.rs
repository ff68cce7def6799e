//! JSON records written to stdout, one object per line. Each carries a
//! `type` tag; the matching schemas live in `schemas/`.

use std::io::Write;

use probewalk::estimator::{EstimatorParams, LevelRecord};
use probewalk::spectral::LambdaEstimate;
use serde::Serialize;

use crate::failure::CliResult;

pub fn emit<T: Serialize>(out: &mut dyn Write, record: &T) -> CliResult<()> {
    serde_json::to_writer(&mut *out, record).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize)]
pub struct ValidateReport {
    #[serde(rename = "type")]
    pub tag: &'static str,
    pub node_count: usize,
    pub edge_count: usize,
    pub duplicate_edges_removed: u64,
    pub self_loops_removed: u64,
    pub connected: bool,
    pub bipartite: bool,
    pub ergodic: bool,
    pub components: usize,
    pub largest_component: usize,
    pub min_degree: u32,
    pub max_degree: u32,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct SpectralReport {
    #[serde(rename = "type")]
    pub tag: &'static str,
    #[serde(flatten)]
    pub estimate: LambdaEstimate,
    pub tol: f64,
    pub max_iter: usize,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Single-pair answer. `L` and `residual_bound` are always present (null when
/// not applicable); the remaining optional fields only appear for the
/// Monte Carlo methods.
#[derive(Serialize)]
pub struct QueryReport {
    #[serde(rename = "type")]
    pub tag: &'static str,
    pub s: u64,
    pub t: u64,
    pub method: &'static str,
    pub beta: f64,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub residual_bound: Option<f64>,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<EstimatorParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub raw_estimate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clamped: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk_steps: Option<u64>,
    #[serde(rename = "L_stop", skip_serializing_if = "Option::is_none")]
    pub l_stop: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilized: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<LevelRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_means: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl QueryReport {
    pub fn baseline(s: u64, t: u64, method: &'static str, beta: f64, l: Option<usize>, wall_ms: f64) -> Self {
        QueryReport {
            tag: "query",
            s,
            t,
            method,
            beta,
            l,
            residual_bound: None,
            wall_ms,
            params: None,
            raw_estimate: None,
            seed: None,
            clamped: None,
            lower_bound: None,
            walk_steps: None,
            l_stop: None,
            stabilized: None,
            levels: None,
            block_means: None,
            warnings: Vec::new(),
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct BenchRow {
    #[serde(rename = "type")]
    pub tag: &'static str,
    pub dataset: String,
    pub s: u64,
    pub t: u64,
    pub method: &'static str,
    pub eps: f64,
    pub estimate: f64,
    pub ground_truth: f64,
    pub rel_error: f64,
    pub wall_ms: f64,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "R")]
    pub r: Option<usize>,
}

#[derive(Serialize)]
pub struct BenchAggregate {
    #[serde(rename = "type")]
    pub tag: &'static str,
    pub dataset: String,
    pub method: &'static str,
    pub eps: f64,
    pub rows: usize,
    pub mean_rel_error: f64,
    pub max_rel_error: f64,
    pub mean_wall_ms: f64,
    /// Share of rows with `rel_error ≤ eps`.
    pub within_eps: f64,
}

#[derive(Serialize)]
pub struct BenchSummary {
    #[serde(rename = "type")]
    pub tag: &'static str,
    pub dataset: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub pairs: usize,
    pub seed: u64,
    pub delta: f64,
    pub eps_grid: Vec<f64>,
    pub methods: Vec<&'static str>,
    pub ground_truth: &'static str,
    pub lambda: Option<f64>,
    pub threads: usize,
    pub rows: usize,
    pub wall_ms: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct Table1Report {
    #[serde(rename = "type")]
    pub tag: &'static str,
    pub dataset: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub pairs: usize,
    pub seed: u64,
    pub method: &'static str,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub wall_ms: f64,
}

#[derive(Serialize)]
pub struct CacheReport {
    #[serde(rename = "type")]
    pub tag: &'static str,
    pub out: String,
    pub node_count: usize,
    pub edge_count: usize,
}

#[derive(Serialize)]
pub struct ProbeReport {
    #[serde(rename = "type")]
    pub tag: &'static str,
    pub seed: u64,
    pub n: u64,
    pub k: u64,
    pub r: u8,
    pub prime: u64,
    pub a: u64,
    pub b: u64,
    pub rounds: usize,
    pub entries: Vec<i8>,
}
