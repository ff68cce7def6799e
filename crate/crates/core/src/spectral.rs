//! Mixing factor `λ = max{|λ₂|, |λₙ|}` of the random-walk matrix.
//!
//! `P = D⁻¹A` is similar to the symmetric `S = D^{-1/2} A D^{-1/2}`, whose top
//! eigenpair is `(1, D^{1/2}·1)`. Power iteration on `S` with that vector
//! projected out converges in norm to the largest remaining magnitude, which
//! is exactly `λ`. When `λ₂ ≈ −λₙ` the iterate itself oscillates between the
//! two eigenvectors, so the residual is measured against `S²`, for which both
//! are a single eigenvalue `λ²`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::Graph;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 100_000;
const WINDOW: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaEstimate {
    pub lambda: f64,
    pub iterations: usize,
    /// `‖S²v − ‖Sv‖²v‖` for the last complete unit iterate `v`.
    pub residual: f64,
    pub converged: bool,
}

/// Applies `S` to `x`.
pub(crate) fn normalized_matvec(
    g: &Graph,
    inv_sqrt_deg: &[f64],
    x: &[f64],
    scratch: &mut [f64],
    out: &mut [f64],
    exec: Execution,
) {
    for ((s, &xi), &w) in scratch.iter_mut().zip(x).zip(inv_sqrt_deg) {
        *s = xi * w;
    }
    let offsets = g.offsets();
    let nbrs = g.neighbor_array();
    let y = &*scratch;
    exec.fill(out, |v| {
        let acc: f64 = nbrs[offsets[v]..offsets[v + 1]].iter().map(|&u| y[u as usize]).sum();
        acc * inv_sqrt_deg[v]
    });
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn deflate(v: &mut [f64], q: &[f64]) {
    let c = dot(v, q);
    for (x, &qi) in v.iter_mut().zip(q) {
        *x -= c * qi;
    }
}

/// Estimates `λ` by deflated power iteration.
///
/// Fails on disconnected or bipartite graphs (where `λ = 1` and every
/// truncation-length formula breaks down). Running out of iterations is not
/// an error: the best iterate is returned with `converged = false`.
pub fn estimate_lambda<R: Rng + ?Sized>(g: &Graph, tol: f64, max_iter: usize, rng: &mut R) -> Result<LambdaEstimate> {
    estimate_lambda_with(g, tol, max_iter, rng, Execution::default())
}

pub fn estimate_lambda_with<R: Rng + ?Sized>(
    g: &Graph,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
    exec: Execution,
) -> Result<LambdaEstimate> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let report = g.validate();
    if !report.connected {
        return Err(Error::Disconnected);
    }
    if report.bipartite {
        return Err(Error::Bipartite);
    }
    let n = g.node_count();
    let total: f64 = g.degrees().iter().map(|&d| f64::from(d)).sum();
    let q: Vec<f64> = g.degrees().iter().map(|&d| (f64::from(d) / total).sqrt()).collect();
    let inv_sqrt_deg: Vec<f64> = g.degrees().iter().map(|&d| 1.0 / f64::from(d).sqrt()).collect();

    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    deflate(&mut v, &q);
    let nv = norm(&v);
    if nv == 0.0 {
        return Err(Error::Numerical("degenerate start vector".into()));
    }
    v.iter_mut().for_each(|x| *x /= nv);

    let mut scratch = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut v_old = vec![0.0; n];
    normalized_matvec(g, &inv_sqrt_deg, &v, &mut scratch, &mut w, exec);
    deflate(&mut w, &q);
    let mut mu = norm(&w);
    let mut history = vec![mu];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;

    while iterations < max_iter {
        iterations += 1;
        if mu <= f64::MIN_POSITIVE {
            // S vanishes off the top eigenvector
            return Ok(LambdaEstimate { lambda: 0.0, iterations, residual: 0.0, converged: true });
        }
        std::mem::swap(&mut v, &mut v_old);
        for (vi, &wi) in v.iter_mut().zip(&w) {
            *vi = wi / mu;
        }
        deflate(&mut v, &q);
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        normalized_matvec(g, &inv_sqrt_deg, &v, &mut scratch, &mut w, exec);
        deflate(&mut w, &q);
        // S²v_old = μ·S v = μ·w, and the S²-Rayleigh quotient of v_old is μ²
        residual = mu * w.iter().zip(&v_old).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt();
        mu = norm(&w);
        history.push(mu);

        if history.len() > WINDOW {
            let old = history[history.len() - 1 - WINDOW];
            if (mu - old).abs() <= tol * mu && residual <= tol {
                break;
            }
        }
    }
    let converged = residual <= tol && history.len() > WINDOW;
    if mu >= 1.0 - 1e-12 {
        return Err(Error::Bipartite);
    }
    Ok(LambdaEstimate { lambda: mu.min(1.0), iterations, residual, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn dense_lambda(g: &Graph) -> f64 {
        let n = g.node_count();
        let mut s = DMatrix::<f64>::zeros(n, n);
        for v in 0..n {
            for &u in g.neighbors(v as u32) {
                s[(v, u as usize)] = 1.0 / (f64::from(g.degree(v as u32)) * f64::from(g.degree(u))).sqrt();
            }
        }
        let mut eig: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        eig.pop();
        eig.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    fn rng() -> Xoshiro256PlusPlus {
        Xoshiro256PlusPlus::seed_from_u64(1)
    }

    fn complete(n: u32) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Graph::from_edges(n as usize, &edges).unwrap()
    }

    #[test]
    fn triangle() {
        let est = estimate_lambda(&complete(3), 1e-9, 1000, &mut rng()).unwrap();
        assert!(est.converged);
        assert!((est.lambda - 0.5).abs() < 1e-9);
        assert!((dense_lambda(&complete(3)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn complete_graphs() {
        for n in [4u32, 10, 50] {
            let est = estimate_lambda(&complete(n), 1e-9, 1000, &mut rng()).unwrap();
            assert!((est.lambda - 1.0 / f64::from(n - 1)).abs() < 1e-9, "n={n}: {}", est.lambda);
        }
    }

    #[test]
    fn bipartite_and_disconnected_are_errors() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(estimate_lambda(&p3, 1e-6, 1000, &mut rng()), Err(Error::Bipartite)));
        let two = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert!(matches!(estimate_lambda(&two, 1e-6, 1000, &mut rng()), Err(Error::Disconnected)));
    }

    #[test]
    fn symmetric_spectrum_tie() {
        // odd cycle: λ₂ = cos(2π/n), λₙ = cos(π(n−1)/n) = −cos(π/n); the latter wins
        let n = 9u32;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_edges(n as usize, &edges).unwrap();
        let est = estimate_lambda(&g, 1e-8, 100_000, &mut rng()).unwrap();
        assert!(est.converged);
        assert!((est.lambda - (std::f64::consts::PI / 9.0).cos()).abs() < 1e-6);
    }

    #[test]
    fn iteration_cap_reports_unconverged() {
        let n = 51u32;
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_edges(n as usize, &edges).unwrap();
        let est = estimate_lambda(&g, 1e-12, 5, &mut rng()).unwrap();
        assert!(!est.converged);
        assert_eq!(est.iterations, 5);
        assert!(est.lambda > 0.0 && est.lambda < 1.0);
    }

    #[test]
    fn matches_dense_on_lollipop() {
        let mut edges: Vec<(u32, u32)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
        edges.extend([(5, 6), (6, 7), (7, 8), (8, 9)]);
        let g = Graph::from_edges(10, &edges).unwrap();
        let est = estimate_lambda(&g, 1e-9, 100_000, &mut rng()).unwrap();
        assert!((est.lambda - dense_lambda(&g)).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(estimate_lambda(&complete(3), 0.0, 10, &mut rng()).is_err());
    }
}
