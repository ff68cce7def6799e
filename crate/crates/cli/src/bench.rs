//! Benchmark harness and the β summary over sampled pairs.
//!
//! Pairs are drawn uniformly from all unordered distinct pairs, without
//! replacement. Timing starts after the graph is loaded and validated.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use probewalk::baseline::{push_beta_with, truncation_length, ExactSolver};
use probewalk::estimator::{
    beta_lower_bound, run_with_params, select_params, stabilized_probewalk, EstimatorParams, QueryOptions,
};
use probewalk::exec::Execution;
use probewalk::generate::sample_pairs;
use probewalk::numeric::tree_mean;
use probewalk::probe::PrfStream;
use probewalk::{Graph, NodeId};

use crate::args::{BenchArgs, Common, GroundTruth, Method, Table1Args};
use crate::commands::{
    check_unit_interval, elapsed_ms, execution, load_graph, max_steps, mixing_factor, require_connected,
    require_ergodic, Loaded,
};
use crate::failure::{CliResult, Failure};
use crate::report::{emit, BenchAggregate, BenchRow, BenchSummary, Table1Report};

const GROUND_TRUTH_L: usize = 1000;
/// Neighbour visits the push ground truth may spend before we refuse.
const GROUND_TRUTH_BUDGET: f64 = 1e12;
const CELL_DOMAIN: u64 = 0x62656e6368000004;

enum Truth {
    Exact(ExactSolver),
    Push,
}

impl Truth {
    fn prepare(g: &Graph, method: GroundTruth, pairs: usize, common: &Common) -> CliResult<Self> {
        match method {
            GroundTruth::Exact => {
                if g.node_count() > common.dense_cap {
                    return Err(Failure::usage(
                        "infeasible_ground_truth",
                        format!(
                            "exact ground truth needs n <= {} (dense cap), graph has n = {}; use --ground-truth push-L1000 or raise --dense-cap",
                            common.dense_cap,
                            g.node_count()
                        ),
                    ));
                }
                Ok(Truth::Exact(ExactSolver::new(g, common.dense_cap)?))
            }
            GroundTruth::PushL1000 => {
                let cost = GROUND_TRUTH_L as f64 * 2.0 * g.edge_count() as f64 * pairs as f64;
                if cost > GROUND_TRUTH_BUDGET {
                    let hint = if g.node_count() <= common.dense_cap { "use --ground-truth exact or " } else { "" };
                    return Err(Failure::usage(
                        "infeasible_ground_truth",
                        format!("push-L1000 ground truth needs ~{cost:.2e} neighbour visits; {hint}reduce --pairs"),
                    ));
                }
                Ok(Truth::Push)
            }
        }
    }

    fn beta(&self, g: &Graph, s: NodeId, t: NodeId, exec: Execution) -> CliResult<f64> {
        Ok(match self {
            Truth::Exact(solver) => solver.beta(g, s, t)?.value,
            Truth::Push => push_beta_with(g, s, t, GROUND_TRUTH_L, None, exec)?.value,
        })
    }
}

fn dataset_label(given: &Option<String>, common: &Common) -> String {
    given.clone().unwrap_or_else(|| {
        common
            .graph
            .as_deref()
            .and_then(Path::file_stem)
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "graph".into())
    })
}

fn draw_pairs(g: &Graph, count: usize, seed: u64) -> CliResult<Vec<(NodeId, NodeId)>> {
    if count == 0 {
        return Err(Failure::usage("invalid_parameter", "pairs must be at least 1"));
    }
    Ok(sample_pairs(g.node_count(), count, seed)?)
}

struct Cell {
    method: Method,
    eps: f64,
    pair: usize,
}

pub fn bench(common: &Common, args: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.eps_grid.is_empty() {
        return Err(Failure::usage("invalid_parameter", "eps-grid must not be empty"));
    }
    for &eps in &args.eps_grid {
        check_unit_interval("epsilon", eps)?;
    }
    check_unit_interval("delta", common.delta)?;
    let mut methods: Vec<Method> = Vec::new();
    for &m in &args.method {
        if !methods.contains(&m) {
            methods.push(m);
        }
    }
    let budget = max_steps(common)?;

    let Loaded { graph: g, mut warnings } = load_graph(common)?;
    warnings.extend(require_ergodic(&g, common)?);
    let pairs = draw_pairs(&g, args.pairs, common.seed)?;
    let truth = Truth::prepare(&g, args.ground_truth, pairs.len(), common)?;
    let solver = match (&truth, methods.contains(&Method::Exact)) {
        (Truth::Exact(_), _) | (_, false) => None,
        (Truth::Push, true) => Some(ExactSolver::new(&g, common.dense_cap)?),
    };
    let exact = match &truth {
        Truth::Exact(s) => Some(s),
        Truth::Push => solver.as_ref(),
    };
    let needs_lambda = common.l.is_none() && methods.iter().any(|m| matches!(m, Method::Probewalk | Method::Push));
    let lambda = if needs_lambda { Some(mixing_factor(&g, common, &mut warnings)?.0) } else { None };

    let started = Instant::now();
    let exec = execution(common);
    let truths: Vec<CliResult<f64>> =
        exec.map_indexed(pairs.len(), |i| truth.beta(&g, pairs[i].0, pairs[i].1, Execution::Sequential));
    let truths = truths.into_iter().collect::<CliResult<Vec<f64>>>()?;

    let mut cells = Vec::new();
    for &method in &methods {
        for &eps in &args.eps_grid {
            cells.extend((0..pairs.len()).map(|pair| Cell { method, eps, pair }));
        }
    }
    // Parameters up front, so an over-budget cell fails before any work.
    let params: Vec<Option<EstimatorParams>> = cells
        .iter()
        .map(|c| match c.method {
            Method::Probewalk => {
                let (s, t) = pairs[c.pair];
                let p = match common.l {
                    Some(level) => probewalk::estimator::params_for_level(&g, s, t, c.eps, common.delta, level)?,
                    None => select_params(&g, s, t, c.eps, common.delta, lambda.expect("λ computed for probewalk"))?,
                };
                if p.predicted_steps() > budget {
                    return Err(Failure::usage(
                        "budget_exceeded",
                        format!(
                            "probewalk at eps={} on pair ({}, {}) needs {:.3e} walk steps, above --max-steps {:.3e}; use a larger eps or raise --max-steps",
                            c.eps,
                            g.original_id(s),
                            g.original_id(t),
                            p.predicted_steps() as f64,
                            budget as f64
                        ),
                    ));
                }
                Ok(Some(p))
            }
            _ => Ok(None),
        })
        .collect::<CliResult<_>>()?;

    let dataset = dataset_label(&args.dataset, common);
    let rows: Vec<CliResult<BenchRow>> = exec.map_indexed(cells.len(), |i| {
        let cell = &cells[i];
        let (s, t) = pairs[cell.pair];
        let opts = QueryOptions {
            exec: Execution::Sequential,
            max_steps: Some(budget),
            clamp: common.clamp,
            retain_block_means: false,
            allow_non_ergodic: common.allow_bipartite,
            materialize: None,
        };
        let seed = PrfStream::new(common.seed, CELL_DOMAIN, i as u64).next_u64();
        let started = Instant::now();
        let (estimate, l, k, r) = match cell.method {
            Method::Exact => (exact.expect("exact solver prepared").beta(&g, s, t)?.value, None, None, None),
            Method::Push => {
                let level = match (common.l, lambda) {
                    (Some(level), _) => level,
                    (None, Some(lambda)) => {
                        let eta = cell.eps * beta_lower_bound(g.degree(s), g.degree(t));
                        truncation_length(g.node_count(), lambda, eta)?
                    }
                    (None, None) => unreachable!("λ computed for push"),
                };
                (push_beta_with(&g, s, t, level, None, Execution::Sequential)?.value, Some(level), None, None)
            }
            Method::Probewalk => {
                let p = params[i].as_ref().expect("parameters prepared");
                let res = run_with_params(&g, s, t, p, seed, &opts)?;
                (res.estimate, Some(p.l), Some(p.k), Some(p.r))
            }
            Method::Stabilized => {
                let res = stabilized_probewalk(&g, s, t, cell.eps, common.delta, common.l0, common.lmax, seed, &opts)?;
                (res.estimate, res.l_stop, Some(res.params.k), Some(res.params.r))
            }
        };
        let wall_ms = elapsed_ms(started, common);
        let gt = truths[cell.pair];
        Ok(BenchRow {
            tag: "row",
            dataset: dataset.clone(),
            s: g.original_id(s),
            t: g.original_id(t),
            method: cell.method.name(),
            eps: cell.eps,
            estimate,
            ground_truth: gt,
            rel_error: (estimate - gt).abs() / gt,
            wall_ms,
            l,
            k,
            r,
        })
    });
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;

    let mut csv = match &args.csv {
        Some(path) => Some(csv::Writer::from_path(path).map_err(|e| Failure::Io(format!("csv: {e}")))?),
        None => None,
    };
    for row in &rows {
        emit(out, row)?;
        if let Some(w) = csv.as_mut() {
            w.serialize(row).map_err(|e| Failure::Io(format!("csv: {e}")))?;
        }
    }
    if let Some(mut w) = csv {
        w.flush()?;
    }

    for group in rows.chunks(pairs.len()) {
        let rel: Vec<f64> = group.iter().map(|r| r.rel_error).collect();
        let wall: Vec<f64> = group.iter().map(|r| r.wall_ms).collect();
        let eps = group[0].eps;
        emit(
            out,
            &BenchAggregate {
                tag: "aggregate",
                dataset: dataset.clone(),
                method: group[0].method,
                eps,
                rows: group.len(),
                mean_rel_error: tree_mean(&rel),
                max_rel_error: rel.iter().copied().fold(0.0, f64::max),
                mean_wall_ms: tree_mean(&wall),
                within_eps: rel.iter().filter(|&&e| e <= eps).count() as f64 / group.len() as f64,
            },
        )?;
    }

    emit(
        out,
        &BenchSummary {
            tag: "summary",
            dataset,
            node_count: g.node_count(),
            edge_count: g.edge_count(),
            pairs: pairs.len(),
            seed: common.seed,
            delta: common.delta,
            eps_grid: args.eps_grid.clone(),
            methods: methods.iter().map(|m| m.name()).collect(),
            ground_truth: args.ground_truth.name(),
            lambda,
            threads: common.threads,
            rows: rows.len(),
            wall_ms: elapsed_ms(started, common),
            warnings,
        },
    )
}

pub fn table1(common: &Common, args: &Table1Args, out: &mut dyn Write) -> CliResult<()> {
    let Loaded { graph: g, .. } = load_graph(common)?;
    require_connected(&g, common)?;
    let pairs = draw_pairs(&g, args.pairs, common.seed)?;
    let truth = Truth::prepare(&g, args.method, pairs.len(), common)?;
    let started = Instant::now();
    let exec = execution(common);
    let values = exec.map_indexed(pairs.len(), |i| truth.beta(&g, pairs[i].0, pairs[i].1, Execution::Sequential));
    let values = values.into_iter().collect::<CliResult<Vec<f64>>>()?;
    emit(
        out,
        &Table1Report {
            tag: "table1",
            dataset: dataset_label(&args.dataset, common),
            node_count: g.node_count(),
            edge_count: g.edge_count(),
            pairs: pairs.len(),
            seed: common.seed,
            method: args.method.name(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: tree_mean(&values),
            wall_ms: elapsed_ms(started, common),
        },
    )
}
