use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::Instant;

use probewalk::baseline::{push_beta_with, ExactSolver};
use probewalk::estimator::{params_for_level, run_with_params, select_params, stabilized_probewalk, QueryOptions};
use probewalk::exec::{configure_threads, Execution};
use probewalk::spectral::{estimate_lambda_with, LambdaEstimate};
use probewalk::{Graph, NodeId, ProbeFamily};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::args::{CacheArgs, Common, Endpoints, Method, ProbeArgs, QueryArgs};
use crate::failure::{CliResult, Failure};
use crate::report::*;

pub const PUSH_DEFAULT_L: usize = 1000;

/// The graph after loading and optional restriction, plus load warnings.
pub struct Loaded {
    pub graph: Graph,
    pub warnings: Vec<String>,
}

pub fn load_graph(common: &Common) -> CliResult<Loaded> {
    let path = common
        .graph
        .as_ref()
        .ok_or_else(|| Failure::usage("missing_graph", "--graph (or PROBEWALK_GRAPH) is required"))?;
    let mut graph = Graph::load(path)?;
    let mut warnings = Vec::new();
    if common.largest_component {
        let before = graph.node_count();
        graph = graph.largest_component();
        if graph.node_count() < before {
            warnings.push(format!("restricted to the largest component: {} of {before} nodes", graph.node_count()));
        }
    }
    Ok(Loaded { graph, warnings })
}

pub fn execution(common: &Common) -> Execution {
    if common.threads > 1 {
        configure_threads(common.threads);
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

pub fn elapsed_ms(started: Instant, common: &Common) -> f64 {
    if common.no_timing {
        0.0
    } else {
        started.elapsed().as_secs_f64() * 1e3
    }
}

pub fn check_unit_interval(name: &str, value: f64) -> CliResult<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Failure::usage("invalid_parameter", format!("{name} must be in (0,1), got {value}")))
    }
}

pub fn check_accuracy(common: &Common) -> CliResult<()> {
    check_unit_interval("epsilon", common.eps)?;
    check_unit_interval("delta", common.delta)
}

pub fn max_steps(common: &Common) -> CliResult<u128> {
    if common.max_steps.is_finite() && common.max_steps >= 0.0 {
        Ok(common.max_steps as u128)
    } else {
        Err(Failure::usage(
            "invalid_parameter",
            format!("max-steps must be a non-negative number, got {}", common.max_steps),
        ))
    }
}

pub fn node(g: &Graph, original: u64) -> CliResult<NodeId> {
    g.dense_id(original).ok_or_else(|| Failure::usage("unknown_node", format!("unknown node id {original}")))
}

pub fn endpoints(g: &Graph, ep: Endpoints) -> CliResult<(NodeId, NodeId)> {
    if ep.s == ep.t {
        return Err(probewalk::Error::SameEndpoints.into());
    }
    Ok((node(g, ep.s)?, node(g, ep.t)?))
}

/// Connectivity is required by every method; bipartite graphs only break
/// the λ-based ones.
pub fn require_connected(g: &Graph, common: &Common) -> CliResult<Vec<String>> {
    let report = g.validate();
    if !report.connected && !common.allow_bipartite {
        return Err(probewalk::Error::Disconnected.into());
    }
    Ok(if report.connected { Vec::new() } else { vec!["graph is disconnected; results may be infinite".into()] })
}

pub fn require_ergodic(g: &Graph, common: &Common) -> CliResult<Vec<String>> {
    Ok(g.validate().check_queryable(common.allow_bipartite)?)
}

/// `--lambda` if given, otherwise the spectral estimate (with a warning if
/// it did not converge).
pub fn mixing_factor(
    g: &Graph,
    common: &Common,
    warnings: &mut Vec<String>,
) -> CliResult<(f64, Option<LambdaEstimate>)> {
    if let Some(lambda) = common.lambda {
        check_unit_interval("lambda", lambda)?;
        return Ok((lambda, None));
    }
    let est = spectral(g, common)?;
    if !est.converged {
        warnings.push(format!("λ estimate did not converge after {} iterations", est.iterations));
    }
    Ok((est.lambda, Some(est)))
}

fn spectral(g: &Graph, common: &Common) -> CliResult<LambdaEstimate> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(common.seed);
    Ok(estimate_lambda_with(g, common.tol, common.max_iter, &mut rng, execution(common))?)
}

pub fn validate(common: &Common, out: &mut dyn Write) -> CliResult<()> {
    let Loaded { graph: g, warnings } = load_graph(common)?;
    let report = g.validate();
    let (labels, components) = g.components();
    let mut sizes = vec![0usize; components];
    for &l in &labels {
        sizes[l as usize] += 1;
    }
    emit(
        out,
        &ValidateReport {
            tag: "validate",
            node_count: report.node_count,
            edge_count: report.edge_count,
            duplicate_edges_removed: report.duplicate_edges_removed,
            self_loops_removed: report.self_loops_removed,
            connected: report.connected,
            bipartite: report.bipartite,
            ergodic: report.is_ergodic(),
            components,
            largest_component: sizes.iter().copied().max().unwrap_or(0),
            min_degree: g.min_degree(),
            max_degree: g.max_degree(),
            warnings,
        },
    )
}

pub fn spectral_cmd(common: &Common, out: &mut dyn Write) -> CliResult<()> {
    let Loaded { graph: g, mut warnings } = load_graph(common)?;
    let started = Instant::now();
    let estimate = spectral(&g, common)?;
    let wall_ms = elapsed_ms(started, common);
    if !estimate.converged {
        warnings.push(format!("did not converge after {} iterations", estimate.iterations));
    }
    emit(
        out,
        &SpectralReport { tag: "spectral", estimate, tol: common.tol, max_iter: common.max_iter, wall_ms, warnings },
    )
}

pub fn exact(common: &Common, ep: Endpoints, out: &mut dyn Write) -> CliResult<()> {
    let report = exact_report(common, ep)?;
    emit(out, &report)
}

fn exact_report(common: &Common, ep: Endpoints) -> CliResult<QueryReport> {
    let Loaded { graph: g, mut warnings } = load_graph(common)?;
    let (s, t) = endpoints(&g, ep)?;
    warnings.extend(require_connected(&g, common)?);
    let started = Instant::now();
    let solver = ExactSolver::new(&g, common.dense_cap)?;
    let value = solver.beta(&g, s, t)?.value;
    let mut report = QueryReport::baseline(ep.s, ep.t, "exact", value, None, elapsed_ms(started, common));
    report.warnings = warnings;
    Ok(report)
}

pub fn push(common: &Common, ep: Endpoints, out: &mut dyn Write) -> CliResult<()> {
    let report = push_report(common, ep)?;
    emit(out, &report)
}

fn push_report(common: &Common, ep: Endpoints) -> CliResult<QueryReport> {
    let Loaded { graph: g, mut warnings } = load_graph(common)?;
    let (s, t) = endpoints(&g, ep)?;
    warnings.extend(require_connected(&g, common)?);
    if let Some(lambda) = common.lambda {
        check_unit_interval("lambda", lambda)?;
    }
    let level = common.l.unwrap_or(PUSH_DEFAULT_L);
    let started = Instant::now();
    let value = push_beta_with(&g, s, t, level, common.lambda, execution(common))?;
    let mut report = QueryReport::baseline(ep.s, ep.t, "push", value.value, Some(level), elapsed_ms(started, common));
    report.residual_bound = value.residual_bound;
    report.warnings = warnings;
    Ok(report)
}

pub fn query(common: &Common, args: &QueryArgs, out: &mut dyn Write) -> CliResult<()> {
    if args.endpoints.s == args.endpoints.t {
        return Err(probewalk::Error::SameEndpoints.into());
    }
    check_accuracy(common)?;
    let report = match args.method {
        Method::Exact => exact_report(common, args.endpoints)?,
        Method::Push => push_report(common, args.endpoints)?,
        Method::Probewalk | Method::Stabilized => monte_carlo_report(common, args)?,
    };
    emit(out, &report)
}

fn monte_carlo_report(common: &Common, args: &QueryArgs) -> CliResult<QueryReport> {
    let Loaded { graph: g, mut warnings } = load_graph(common)?;
    let (s, t) = endpoints(&g, args.endpoints)?;
    warnings.extend(require_ergodic(&g, common)?);
    let opts = QueryOptions {
        exec: execution(common),
        max_steps: Some(max_steps(common)?),
        clamp: common.clamp,
        retain_block_means: args.block_means,
        allow_non_ergodic: common.allow_bipartite,
        materialize: None,
    };
    let result = match (args.method, common.l) {
        (Method::Stabilized, _) => {
            stabilized_probewalk(&g, s, t, common.eps, common.delta, common.l0, common.lmax, common.seed, &opts)?
        }
        (_, Some(level)) => {
            let params = params_for_level(&g, s, t, common.eps, common.delta, level)?;
            run_with_params(&g, s, t, &params, common.seed, &opts)?
        }
        (_, None) => {
            let (lambda, _) = mixing_factor(&g, common, &mut warnings)?;
            let params = select_params(&g, s, t, common.eps, common.delta, lambda)?;
            run_with_params(&g, s, t, &params, common.seed, &opts)?
        }
    };
    warnings.extend(result.warnings.iter().filter(|w| !warnings.contains(w)).cloned().collect::<Vec<_>>());
    Ok(QueryReport {
        tag: "query",
        s: args.endpoints.s,
        t: args.endpoints.t,
        method: args.method.name(),
        beta: result.estimate,
        l: Some(result.params.l),
        residual_bound: None,
        wall_ms: if common.no_timing { 0.0 } else { result.wall_ms },
        raw_estimate: Some(result.raw_estimate),
        seed: Some(result.seed),
        clamped: Some(result.clamped),
        lower_bound: Some(result.lower_bound),
        walk_steps: Some(result.walk_steps),
        l_stop: result.l_stop,
        stabilized: result.stabilized,
        levels: (!result.levels.is_empty()).then_some(result.levels),
        block_means: result.block_means,
        params: Some(result.params),
        warnings,
    })
}

pub fn cache(common: &Common, args: &CacheArgs, out: &mut dyn Write) -> CliResult<()> {
    let Loaded { graph: g, .. } = load_graph(common)?;
    let mut file = BufWriter::new(File::create(&args.out)?);
    g.write_cache(&mut file)?;
    file.flush()?;
    emit(
        out,
        &CacheReport {
            tag: "cache",
            out: args.out.display().to_string(),
            node_count: g.node_count(),
            edge_count: g.edge_count(),
        },
    )
}

pub fn probe(common: &Common, args: &ProbeArgs, out: &mut dyn Write) -> CliResult<()> {
    let n = match args.n {
        Some(n) => n,
        None => load_graph(common)?.graph.node_count() as u64,
    };
    let family = ProbeFamily::new(common.seed, n)?;
    for k in args.k..args.k.saturating_add(args.count) {
        let key = family.key(k);
        emit(
            out,
            &ProbeReport {
                tag: "probe",
                seed: common.seed,
                n,
                k,
                r: key.r,
                prime: key.p,
                a: key.a,
                b: key.b,
                rounds: key.rounds,
                entries: key.materialize()?,
            },
        )?;
    }
    Ok(())
}
