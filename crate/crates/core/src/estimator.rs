//! The ProbeWalk estimator.
//!
//! For each of `K = B·G` Paired-Sign Probes `z`, `R` replicas of
//! `U = Σ_{i≤L} z_{X_i}/d_{X_i} − Σ_{i≤L} z_{Y_i}/d_{Y_i}` (independent walks
//! from `s` and `t`) are combined into the U-statistic
//! `Q_R = ((ΣU)² − ΣU²)/(R(R−1))`, which is unbiased for `(zᵀh^{(L)})²`.
//! Averaging over probes targets `β^{(L)}(s,t)`; the `K` values are reduced
//! by median-of-means over `G` consecutive blocks of size `B`.
//!
//! Probe `k` draws its walks from its own generator seeded by
//! `(seed, k)`, so results do not depend on scheduling.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{Graph, NodeId};
use crate::numeric::{median, robust_ceil, tree_mean};
use crate::probe::{PrfStream, ProbeFamily, ProbeKey, WALK_DOMAIN};

pub const DEFAULT_L0: usize = 1;
pub const DEFAULT_LMAX: usize = 256;
/// Default ceiling on predicted walk steps for a single query.
pub const DEFAULT_MAX_STEPS: u128 = 100_000_000_000;
const LEVEL_DOMAIN: u64 = 0x6c65_7665_6c00_0003;

/// Degree-only lower bound `β(s,t) ≥ (1/8)(1/d_s + 1/d_t)²`.
pub fn beta_lower_bound(d_s: u32, d_t: u32) -> f64 {
    let x = 1.0 / f64::from(d_s) + 1.0 / f64::from(d_t);
    x * x / 8.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimatorParams {
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "G")]
    pub g: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "R")]
    pub r: usize,
    /// Absent when `L` was given explicitly (stabilized mode).
    pub lambda: Option<f64>,
}

impl EstimatorParams {
    /// `K·R·2(L+1)` walk positions, the budgeted quantity.
    pub fn predicted_steps(&self) -> u128 {
        self.k as u128 * self.r as u128 * 2 * (self.l as u128 + 1)
    }

    /// `K·R·2L` neighbour draws actually made.
    pub fn neighbor_draws(&self) -> u128 {
        self.k as u128 * self.r as u128 * 2 * self.l as u128
    }
}

fn check_eps_delta(eps: f64, delta: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be in (0,1), got {eps}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must be in (0,1), got {delta}")));
    }
    Ok(())
}

/// `B = ⌈448/ε²⌉`.
pub fn block_size(eps: f64) -> usize {
    robust_ceil(448.0 / (eps * eps)) as usize
}

/// `G = ⌈8 ln(1/δ)⌉`, at least 1.
pub fn block_count(delta: f64) -> usize {
    (robust_ceil(8.0 * (1.0 / delta).ln()) as usize).max(1)
}

/// `R = ⌈128(L+1)² / (d_min²(1−ε/2)(1/d_s+1/d_t)²)⌉`, at least 2.
pub fn replica_count(level: usize, d_min: u32, d_s: u32, d_t: u32, eps: f64) -> usize {
    let l1 = level as f64 + 1.0;
    let inv = 1.0 / f64::from(d_s) + 1.0 / f64::from(d_t);
    let dm = f64::from(d_min);
    let r = 128.0 * l1 * l1 / (dm * dm * (1.0 - eps / 2.0) * inv * inv);
    (robust_ceil(r) as usize).max(2)
}

/// `L = ⌈ln(96n / (ε(1−λ)²(1/d_s+1/d_t)²)) / ln(1/λ)⌉`, floored at 0.
pub fn walk_length(n: usize, d_s: u32, d_t: u32, eps: f64, lambda: f64) -> Result<usize> {
    if lambda >= 1.0 {
        return Err(Error::InvalidParameter(format!("mixing factor {lambda} >= 1 (bipartite or disconnected graph)")));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("mixing factor must lie in (0, 1), got {lambda}")));
    }
    let inv = 1.0 / f64::from(d_s) + 1.0 / f64::from(d_t);
    let x = (96.0 * n as f64 / (eps * (1.0 - lambda).powi(2) * inv * inv)).ln() / (1.0 / lambda).ln();
    Ok(robust_ceil(x).max(0.0) as usize)
}

fn endpoint_degrees(g: &Graph, s: NodeId, t: NodeId) -> Result<(u32, u32)> {
    g.check_node(s)?;
    g.check_node(t)?;
    if s == t {
        return Err(Error::SameEndpoints);
    }
    for v in [s, t] {
        if g.degree(v) == 0 {
            return Err(Error::IsolatedNode(v));
        }
    }
    if g.min_degree() == 0 {
        let v = g.degrees().iter().position(|&d| d == 0).unwrap_or(0);
        return Err(Error::IsolatedNode(v as NodeId));
    }
    Ok((g.degree(s), g.degree(t)))
}

/// All parameters of a query with known mixing factor.
pub fn select_params(g: &Graph, s: NodeId, t: NodeId, eps: f64, delta: f64, lambda: f64) -> Result<EstimatorParams> {
    check_eps_delta(eps, delta)?;
    let (d_s, d_t) = endpoint_degrees(g, s, t)?;
    let l = walk_length(g.node_count(), d_s, d_t, eps, lambda)?;
    let mut params = params_for_level(g, s, t, eps, delta, l)?;
    params.lambda = Some(lambda);
    Ok(params)
}

/// Parameters for an explicitly chosen walk length.
pub fn params_for_level(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    eps: f64,
    delta: f64,
    level: usize,
) -> Result<EstimatorParams> {
    check_eps_delta(eps, delta)?;
    let (d_s, d_t) = endpoint_degrees(g, s, t)?;
    let b = block_size(eps);
    let gc = block_count(delta);
    Ok(EstimatorParams {
        epsilon: eps,
        delta,
        l: level,
        b,
        g: gc,
        k: b * gc,
        r: replica_count(level, g.min_degree(), d_s, d_t, eps),
        lambda: None,
    })
}

/// Running sums of replica values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct WalkAccumulator {
    pub s1: f64,
    pub s2: f64,
    pub count: usize,
}

impl WalkAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline(always)]
    pub fn push(&mut self, u: f64) {
        self.s1 += u;
        self.s2 += u * u;
        self.count += 1;
    }

    pub fn from_replicas(values: &[f64]) -> Self {
        let mut acc = Self::new();
        values.iter().for_each(|&u| acc.push(u));
        acc
    }
}

/// `(S1² − S2)/(R(R−1))`: the mean of `U_p·U_q` over ordered pairs `p ≠ q`.
pub fn u_statistic(acc: &WalkAccumulator) -> Result<f64> {
    if acc.count < 2 {
        return Err(Error::InvalidParameter(format!("U-statistic needs at least 2 replicas, got {}", acc.count)));
    }
    let r = acc.count as f64;
    Ok((acc.s1 * acc.s1 - acc.s2) / (r * (r - 1.0)))
}

/// Means of `G` consecutive equal-size blocks.
pub fn block_means(values: &[f64], blocks: usize) -> Result<Vec<f64>> {
    if blocks == 0 || values.is_empty() || !values.len().is_multiple_of(blocks) {
        return Err(Error::InvalidParameter(format!(
            "{} values cannot be split into {blocks} equal non-empty blocks",
            values.len()
        )));
    }
    Ok(values.chunks(values.len() / blocks).map(tree_mean).collect())
}

/// Median of the block means (average of the central pair for even `G`).
pub fn median_of_means(values: &[f64], blocks: usize) -> Result<f64> {
    Ok(median(&block_means(values, blocks)?))
}

#[inline(always)]
fn walk_sum<R: RngCore + ?Sized, W: Fn(NodeId) -> f64>(
    g: &Graph,
    start: NodeId,
    level: usize,
    weight: &W,
    rng: &mut R,
) -> f64 {
    let mut v = start;
    let mut acc = weight(v);
    for _ in 0..level {
        v = g.step(v, rng);
        acc += weight(v);
    }
    acc
}

#[inline(always)]
fn on_the_fly<'a>(g: &'a Graph, pk: &'a ProbeKey) -> impl Fn(NodeId) -> f64 + 'a {
    let degrees = g.degrees();
    move |v| f64::from(pk.entry_unchecked(u64::from(v))) / f64::from(degrees[v as usize])
}

/// `Σ_{i=0}^{L} z_{X_i}/d_{X_i}` along one simple random walk from `start`.
/// Consumes exactly `L` neighbour draws.
///
/// # Panics
/// If `start` is out of range.
pub fn walk_probe_sum<R: RngCore + ?Sized>(g: &Graph, start: NodeId, level: usize, pk: &ProbeKey, rng: &mut R) -> f64 {
    assert!((start as usize) < g.node_count(), "start node {start} out of range");
    walk_sum(g, start, level, &on_the_fly(g, pk), rng)
}

/// One replica `U = walk(s) − walk(t)` with independent walks.
pub fn replica<R: RngCore + ?Sized>(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    level: usize,
    pk: &ProbeKey,
    rng: &mut R,
) -> Result<f64> {
    endpoint_degrees(g, s, t)?;
    let w = on_the_fly(g, pk);
    Ok(walk_sum(g, s, level, &w, rng) - walk_sum(g, t, level, &w, rng))
}

/// `Q_R` for one probe from `R` fresh replicas.
pub fn probe_statistic<R: RngCore + ?Sized>(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    level: usize,
    replicas: usize,
    pk: &ProbeKey,
    rng: &mut R,
) -> Result<f64> {
    endpoint_degrees(g, s, t)?;
    let w = on_the_fly(g, pk);
    let mut acc = WalkAccumulator::new();
    for _ in 0..replicas {
        acc.push(walk_sum(g, s, level, &w, rng) - walk_sum(g, t, level, &w, rng));
    }
    u_statistic(&acc)
}

#[allow(clippy::too_many_arguments)]
#[inline(always)]
fn accumulate<R: RngCore + ?Sized, W: Fn(NodeId) -> f64>(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    level: usize,
    replicas: usize,
    w: &W,
    rng: &mut R,
    bound: f64,
) -> WalkAccumulator {
    let mut acc = WalkAccumulator::new();
    for _ in 0..replicas {
        let u = walk_sum(g, s, level, w, rng) - walk_sum(g, t, level, w, rng);
        debug_assert!(u.abs() <= bound, "replica {u} exceeds envelope {bound}");
        acc.push(u);
    }
    acc
}

/// Walk generator for probe `k`.
pub fn walk_rng(seed: u64, k: u64) -> Xoshiro256PlusPlus {
    let mut prf = PrfStream::new(seed, WALK_DOMAIN, k);
    let mut bytes = [0u8; 32];
    for chunk in bytes.chunks_exact_mut(8) {
        chunk.copy_from_slice(&prf.next_u64().to_le_bytes());
    }
    Xoshiro256PlusPlus::from_seed(bytes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    Probewalk,
    Stabilized,
}

#[derive(Clone, Debug)]
pub struct QueryOptions {
    pub exec: Execution,
    /// Refuse to start when `K·R·2(L+1)` exceeds this.
    pub max_steps: Option<u128>,
    pub clamp: bool,
    pub retain_block_means: bool,
    /// Run on disconnected or bipartite graphs anyway (with warnings).
    pub allow_non_ergodic: bool,
    /// Force (`Some(true)`) or forbid (`Some(false)`) expanding each probe to
    /// a dense weight vector; `None` picks whichever evaluates fewer entries.
    /// The estimate is bit-identical either way.
    pub materialize: Option<bool>,
}

impl Default for QueryOptions {
    fn default() -> Self {
        Self {
            exec: Execution::default(),
            max_steps: Some(DEFAULT_MAX_STEPS),
            clamp: false,
            retain_block_means: true,
            allow_non_ergodic: false,
            materialize: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelRecord {
    #[serde(rename = "L")]
    pub l: usize,
    pub estimate: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryResult {
    pub s: NodeId,
    pub t: NodeId,
    /// Reported value (after the optional clamp).
    pub estimate: f64,
    /// Median of block means, never clamped.
    pub raw_estimate: f64,
    pub params: EstimatorParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block_means: Option<Vec<f64>>,
    pub seed: u64,
    pub wall_ms: f64,
    pub mode: QueryMode,
    #[serde(rename = "L_stop")]
    pub l_stop: Option<usize>,
    /// Stabilized mode: whether the doubling rule accepted before `Lmax`.
    pub stabilized: Option<bool>,
    pub clamped: bool,
    pub lower_bound: f64,
    /// Neighbour draws performed.
    pub walk_steps: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn check_budget(predicted: u128, budget: Option<u128>) -> Result<()> {
    match budget {
        Some(b) if predicted > b => Err(Error::BudgetExceeded { predicted, budget: b }),
        _ => Ok(()),
    }
}

/// ProbeWalk with parameters derived from `(ε, δ, λ)`.
pub fn probewalk(g: &Graph, s: NodeId, t: NodeId, eps: f64, delta: f64, lambda: f64, seed: u64) -> Result<QueryResult> {
    probewalk_with(g, s, t, eps, delta, lambda, seed, &QueryOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn probewalk_with(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    eps: f64,
    delta: f64,
    lambda: f64,
    seed: u64,
    opts: &QueryOptions,
) -> Result<QueryResult> {
    let params = select_params(g, s, t, eps, delta, lambda)?;
    run_with_params(g, s, t, &params, seed, opts)
}

/// Runs the estimator for fully specified parameters.
pub fn run_with_params(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    params: &EstimatorParams,
    seed: u64,
    opts: &QueryOptions,
) -> Result<QueryResult> {
    let warnings = g.validate().check_queryable(opts.allow_non_ergodic)?;
    let (d_s, d_t) = endpoint_degrees(g, s, t)?;
    if params.r < 2 || params.k == 0 || params.g == 0 || params.k != params.b * params.g {
        return Err(Error::InvalidParameter(format!(
            "inconsistent parameters: K={} B={} G={} R={}",
            params.k, params.b, params.g, params.r
        )));
    }
    check_budget(params.predicted_steps(), opts.max_steps)?;

    let started = Instant::now();
    let n = g.node_count();
    let family = ProbeFamily::new(seed, n as u64)?;
    let (level, replicas) = (params.l, params.r);
    let materialize = opts.materialize.unwrap_or((n as u128) < (replicas as u128) * 2 * (level as u128 + 1));
    let bound = 2.0 * (level as f64 + 1.0) / f64::from(g.min_degree()) * (1.0 + 1e-12);

    let per_probe = opts.exec.map_indexed(params.k, |k| {
        let pk = family.key(k as u64);
        let mut rng = walk_rng(seed, k as u64);
        let acc = if materialize {
            let degrees = g.degrees();
            let weights: Vec<f64> =
                (0..n).map(|v| f64::from(pk.entry_unchecked(v as u64)) / f64::from(degrees[v])).collect();
            accumulate(g, s, t, level, replicas, &|v| weights[v as usize], &mut rng, bound)
        } else {
            accumulate(g, s, t, level, replicas, &on_the_fly(g, &pk), &mut rng, bound)
        };
        let r = acc.count as f64;
        ((acc.s1 * acc.s1 - acc.s2) / (r * (r - 1.0)), acc.count as u64 * 2 * level as u64)
    });

    let q: Vec<f64> = per_probe.iter().map(|&(q, _)| q).collect();
    let walk_steps = per_probe.iter().map(|&(_, d)| d).sum();
    let means = block_means(&q, params.g)?;
    let raw = median(&means);
    let lower_bound = beta_lower_bound(d_s, d_t);
    let floor = lower_bound * (1.0 - params.epsilon);
    let clamped = opts.clamp && raw < floor;
    Ok(QueryResult {
        s,
        t,
        estimate: if clamped { floor } else { raw },
        raw_estimate: raw,
        params: params.clone(),
        block_means: opts.retain_block_means.then_some(means),
        seed,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        mode: QueryMode::Probewalk,
        l_stop: None,
        stabilized: None,
        clamped,
        lower_bound,
        walk_steps,
        levels: Vec::new(),
        warnings,
    })
}

/// Seed used for the run at walk length `level` in stabilized mode.
pub fn level_seed(seed: u64, level: usize) -> u64 {
    PrfStream::new(seed, LEVEL_DOMAIN, level as u64).next_u64()
}

/// Doubling acceptance rule: `|β̂(2L) − β̂(L)| ≤ (ε/2)·|β̂(2L)|`.
pub fn stabilization_accepts(prev: f64, next: f64, eps: f64) -> bool {
    (next - prev).abs() <= 0.5 * eps * next.abs()
}

/// ProbeWalk without `λ`: doubles `L` from `L0` until consecutive estimates
/// agree to within `ε/2` (relative), up to `Lmax`.
#[allow(clippy::too_many_arguments)]
pub fn stabilized_probewalk(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    eps: f64,
    delta: f64,
    l0: usize,
    lmax: usize,
    seed: u64,
    opts: &QueryOptions,
) -> Result<QueryResult> {
    if l0 == 0 {
        return Err(Error::InvalidParameter("L0 must be at least 1".into()));
    }
    if lmax < l0 || !lmax.is_multiple_of(l0) || !(lmax / l0).is_power_of_two() {
        return Err(Error::InvalidParameter(format!("Lmax={lmax} is not a power-of-two multiple of L0={l0}")));
    }
    let started = Instant::now();
    let mut remaining = opts.max_steps;
    let mut levels = Vec::new();
    let mut walk_steps = 0u64;
    let mut level = l0;
    let mut prev: Option<f64> = None;
    loop {
        let params = params_for_level(g, s, t, eps, delta, level)?;
        check_budget(params.predicted_steps(), remaining)?;
        let lseed = level_seed(seed, level);
        let mut result = run_with_params(g, s, t, &params, lseed, opts)?;
        remaining = remaining.map(|b| b - params.predicted_steps());
        walk_steps += result.walk_steps;
        levels.push(LevelRecord { l: level, estimate: result.raw_estimate, seed: lseed });
        let accepted = prev.is_some_and(|p| stabilization_accepts(p, result.raw_estimate, eps));
        if accepted || level >= lmax {
            result.mode = QueryMode::Stabilized;
            result.seed = seed;
            result.l_stop = Some(level);
            result.stabilized = Some(accepted);
            result.walk_steps = walk_steps;
            result.levels = levels;
            result.wall_ms = started.elapsed().as_secs_f64() * 1e3;
            if !accepted {
                result.warnings.push(format!("estimate did not stabilize before Lmax={lmax}"));
            }
            return Ok(result);
        }
        prev = Some(result.raw_estimate);
        level *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probe::derive_probe;

    fn complete(n: u32) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Graph::from_edges(n as usize, &edges).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(beta_lower_bound(2, 2), 0.125);
        assert_eq!(beta_lower_bound(1, 1), 0.5);
    }

    #[test]
    fn block_parameters() {
        assert_eq!(block_size(0.1), 44_800);
        assert_eq!(block_count(0.01), 37);
        assert_eq!(block_size(0.1) * block_count(0.01), 1_657_600);
        assert_eq!(block_size(0.2), 11_200);
        assert_eq!(block_count(0.9), 1);
    }

    #[test]
    fn triangle_parameters() {
        let g = complete(3);
        let p = select_params(&g, 0, 1, 0.1, 0.01, 0.5).unwrap();
        assert_eq!(p.l, 14);
        assert_eq!(p.r, 7579);
        assert_eq!(p.k, 1_657_600);
        assert_eq!(p.lambda, Some(0.5));
    }

    #[test]
    fn parameter_errors() {
        let g = complete(3);
        assert!(select_params(&g, 0, 1, 1.0, 0.1, 0.5).is_err());
        assert!(select_params(&g, 0, 1, 1.5, 0.1, 0.5).is_err());
        assert!(select_params(&g, 0, 1, 0.1, 0.0, 0.5).is_err());
        assert!(select_params(&g, 0, 1, 0.1, 0.1, 1.0).is_err());
        assert!(matches!(select_params(&g, 1, 1, 0.1, 0.1, 0.5), Err(Error::SameEndpoints)));
    }

    #[test]
    fn replica_floor_is_two() {
        assert_eq!(replica_count(0, 1000, 1, 1, 0.5), 2);
    }

    #[test]
    fn u_statistic_examples() {
        let q = |v: &[f64]| u_statistic(&WalkAccumulator::from_replicas(v)).unwrap();
        assert_eq!(q(&[1.0, 1.0]), 1.0);
        assert_eq!(q(&[1.0, -1.0]), -1.0);
        assert!((q(&[2.0, 4.0, 6.0]) - 44.0 / 3.0).abs() < 1e-12);
        assert!(u_statistic(&WalkAccumulator::from_replicas(&[3.0])).is_err());
    }

    #[test]
    fn median_of_means_examples() {
        let v: Vec<f64> = (1..=6).map(f64::from).collect();
        assert_eq!(block_means(&v, 3).unwrap(), vec![1.5, 3.5, 5.5]);
        assert_eq!(median_of_means(&v, 3).unwrap(), 3.5);
        assert_eq!(median_of_means(&v, 1).unwrap(), 3.5);
        assert_eq!(median_of_means(&v, 2).unwrap(), 3.5);
        assert!(median_of_means(&v, 4).is_err());
        let mut blocks = vec![1.0; 6 * 10];
        blocks[..10].iter_mut().for_each(|x| *x = 1e9);
        assert_eq!(median_of_means(&blocks, 6).unwrap(), 1.0);
    }

    #[test]
    fn zero_length_walk() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let pk = derive_probe(3, 0, 4).unwrap();
        let mut rng = walk_rng(1, 0);
        for v in 0..4 {
            let expect = f64::from(pk.entry(u64::from(v)).unwrap()) / f64::from(g.degree(v));
            assert_eq!(walk_probe_sum(&g, v, 0, &pk, &mut rng), expect);
        }
    }

    #[test]
    fn stabilization_rule() {
        assert!(stabilization_accepts(0.3, 0.3, 0.01));
        assert!(stabilization_accepts(1.0, 1.04, 0.1));
        assert!(!stabilization_accepts(1.0, 1.06, 0.1));
    }

    #[test]
    fn stabilized_argument_checks() {
        let g = complete(4);
        let o = QueryOptions::default();
        assert!(stabilized_probewalk(&g, 0, 1, 0.5, 0.5, 0, 8, 1, &o).is_err());
        assert!(stabilized_probewalk(&g, 0, 1, 0.5, 0.5, 3, 8, 1, &o).is_err());
        assert!(stabilized_probewalk(&g, 0, 1, 0.5, 0.5, 2, 12, 1, &o).is_err());
    }

    #[test]
    fn budget_is_checked_before_running() {
        let g = complete(3);
        let opts = QueryOptions { max_steps: Some(1000), ..Default::default() };
        match probewalk_with(&g, 0, 1, 0.1, 0.01, 0.5, 1, &opts) {
            Err(Error::BudgetExceeded { predicted, budget }) => {
                assert_eq!(predicted, 1_657_600u128 * 7579 * 30);
                assert_eq!(budget, 1000);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}
