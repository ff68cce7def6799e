//! Reference values for `β(s,t)`: a dense exact solve and the deterministic
//! truncated series (PUSH).

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{Graph, NodeId};
use crate::numeric::{robust_ceil, tree_sum};

pub const DEFAULT_DENSE_CAP: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMethod {
    Exact,
    Push,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaValue {
    pub value: f64,
    pub method: BaselineMethod,
    /// Truncation length (push only).
    #[serde(rename = "L")]
    pub level: Option<usize>,
    /// Guaranteed `|β^{(L)} − β|` bound when `λ` was supplied (push only).
    pub residual_bound: Option<f64>,
}

fn check_pair(g: &Graph, s: NodeId, t: NodeId) -> Result<()> {
    g.check_node(s)?;
    g.check_node(t)?;
    if s == t {
        return Err(Error::SameEndpoints);
    }
    Ok(())
}

/// Dense factorisation of `L + 11ᵀ/n`, reusable across pairs.
///
/// `L† = (L + 11ᵀ/n)⁻¹ − 11ᵀ/n` and `1ᵀb_st = 0`, so `L†b_st` is a single
/// solve against the regularised matrix.
pub struct ExactSolver {
    n: usize,
    chol: Cholesky<f64, Dyn>,
}

impl ExactSolver {
    pub fn new(g: &Graph, dense_cap: usize) -> Result<Self> {
        let n = g.node_count();
        if n > dense_cap {
            return Err(Error::DenseCapExceeded { n, cap: dense_cap });
        }
        if !g.validate().connected {
            return Err(Error::Disconnected);
        }
        let inv_n = 1.0 / n as f64;
        let mut m = DMatrix::<f64>::from_element(n, n, inv_n);
        for v in 0..n {
            m[(v, v)] += f64::from(g.degree(v as NodeId));
            for &u in g.neighbors(v as NodeId) {
                m[(v, u as usize)] -= 1.0;
            }
        }
        let chol = Cholesky::new(m)
            .ok_or_else(|| Error::Numerical("regularised Laplacian is not positive definite".into()))?;
        Ok(Self { n, chol })
    }

    /// `L†(e_s − e_t)`.
    pub fn embedding_difference(&self, s: NodeId, t: NodeId) -> DVector<f64> {
        let mut b = DVector::<f64>::zeros(self.n);
        b[s as usize] = 1.0;
        b[t as usize] = -1.0;
        self.chol.solve(&b)
    }

    pub fn beta(&self, g: &Graph, s: NodeId, t: NodeId) -> Result<BetaValue> {
        check_pair(g, s, t)?;
        let x = self.embedding_difference(s, t);
        let squares: Vec<f64> = x.iter().map(|v| v * v).collect();
        Ok(BetaValue { value: tree_sum(&squares), method: BaselineMethod::Exact, level: None, residual_bound: None })
    }
}

/// Exact `β(s,t) = ‖L†b_st‖²` via a dense factorisation (n ≤ `dense_cap`).
pub fn exact_beta(g: &Graph, s: NodeId, t: NodeId) -> Result<BetaValue> {
    exact_beta_with_cap(g, s, t, DEFAULT_DENSE_CAP)
}

pub fn exact_beta_with_cap(g: &Graph, s: NodeId, t: NodeId, dense_cap: usize) -> Result<BetaValue> {
    check_pair(g, s, t)?;
    ExactSolver::new(g, dense_cap)?.beta(g, s, t)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 1.0 {
        return Err(Error::InvalidParameter(format!("mixing factor {lambda} >= 1 (bipartite or disconnected graph)")));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("mixing factor must lie in (0, 1), got {lambda}")));
    }
    Ok(())
}

/// Smallest `L` for which the truncation error is at most `η/2`:
/// `⌈ln(12n/(η(1−λ)²)) / ln(1/λ)⌉`, floored at zero.
pub fn truncation_length(n: usize, lambda: f64, eta: f64) -> Result<usize> {
    check_lambda(lambda)?;
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    let x = (12.0 * n as f64 / (eta * (1.0 - lambda).powi(2))).ln() / (1.0 / lambda).ln();
    Ok(robust_ceil(x).max(0.0) as usize)
}

/// The truncation envelope for a given `L`: `|β^{(L)} − β| ≤ 6nλ^L/(1−λ)²`.
pub fn truncation_error_bound(n: usize, lambda: f64, level: usize) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(6.0 * n as f64 * lambda.powf(level as f64) / (1.0 - lambda).powi(2))
}

/// Running state of `h^{(i)} = Σ_{j≤i} P^j D⁻¹ b_st` with `P = D⁻¹A`.
#[derive(Clone, Debug)]
pub struct TruncatedSeriesState {
    pub h: Vec<f64>,
    pub cur: Vec<f64>,
    pub level: usize,
    next: Vec<f64>,
    ops: u64,
}

impl TruncatedSeriesState {
    pub fn new(g: &Graph, s: NodeId, t: NodeId) -> Result<Self> {
        check_pair(g, s, t)?;
        let n = g.node_count();
        let mut cur = vec![0.0; n];
        cur[s as usize] = 1.0 / f64::from(g.degree(s));
        cur[t as usize] = -1.0 / f64::from(g.degree(t));
        Ok(Self { h: cur.clone(), cur, level: 0, next: vec![0.0; n], ops: 0 })
    }

    /// Advances one level: `cur ← P·cur`, `h ← h + cur`.
    pub fn step(&mut self, g: &Graph, exec: Execution) {
        let offsets = g.offsets();
        let nbrs = g.neighbor_array();
        let degrees = g.degrees();
        let cur = &self.cur;
        let touched = AtomicU64::new(0);
        exec.fill(&mut self.next, |v| {
            let adj = &nbrs[offsets[v]..offsets[v + 1]];
            touched.fetch_add(adj.len() as u64, Ordering::Relaxed);
            adj.iter().map(|&u| cur[u as usize]).sum::<f64>() / f64::from(degrees[v])
        });
        self.ops += touched.into_inner();
        std::mem::swap(&mut self.cur, &mut self.next);
        for (h, &c) in self.h.iter_mut().zip(&self.cur) {
            *h += c;
        }
        self.level += 1;
    }

    /// Neighbour reads performed so far (2m per level).
    pub fn operations(&self) -> u64 {
        self.ops
    }

    /// `‖h‖² − (1/n)(1ᵀh)²` for the current `h`.
    pub fn beta(&self) -> f64 {
        let n = self.h.len() as f64;
        let squares: Vec<f64> = self.h.iter().map(|x| x * x).collect();
        let total = tree_sum(&self.h);
        tree_sum(&squares) - total * total / n
    }
}

/// Truncated-series value `β^{(L)}(s,t)`; attaches the truncation envelope
/// when `λ` is known.
pub fn push_beta(g: &Graph, s: NodeId, t: NodeId, level: usize, lambda: Option<f64>) -> Result<BetaValue> {
    push_beta_with(g, s, t, level, lambda, Execution::default())
}

pub fn push_beta_with(
    g: &Graph,
    s: NodeId,
    t: NodeId,
    level: usize,
    lambda: Option<f64>,
    exec: Execution,
) -> Result<BetaValue> {
    let residual_bound = lambda.map(|l| truncation_error_bound(g.node_count(), l, level)).transpose()?;
    let mut state = TruncatedSeriesState::new(g, s, t)?;
    for _ in 0..level {
        state.step(g, exec);
    }
    Ok(BetaValue { value: state.beta(), method: BaselineMethod::Push, level: Some(level), residual_bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: u32) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Graph::from_edges(n as usize, &edges).unwrap()
    }

    fn p3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn exact_on_complete_graphs() {
        for n in [3u32, 5, 8] {
            let g = complete(n);
            let b = exact_beta(&g, 0, 1).unwrap();
            assert!((b.value - 2.0 / f64::from(n * n)).abs() < 1e-12);
            assert_eq!(b.method, BaselineMethod::Exact);
        }
    }

    #[test]
    fn exact_on_path() {
        let g = p3();
        assert!((exact_beta(&g, 0, 2).unwrap().value - 2.0).abs() < 1e-12);
        assert!((exact_beta(&g, 0, 1).unwrap().value - 2.0 / 3.0).abs() < 1e-12);
        assert!((exact_beta(&g, 2, 0).unwrap().value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exact_errors() {
        let g = p3();
        assert!(matches!(exact_beta(&g, 1, 1), Err(Error::SameEndpoints)));
        assert!(matches!(exact_beta_with_cap(&g, 0, 1, 2), Err(Error::DenseCapExceeded { n: 3, cap: 2 })));
        let two = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(exact_beta(&two, 0, 2), Err(Error::Disconnected)));
        assert!(exact_beta(&g, 0, 3).is_err());
    }

    #[test]
    fn truncation_length_examples() {
        assert_eq!(truncation_length(1000, 0.5, 0.1).unwrap(), 19);
        let mut last = usize::MAX;
        for lambda in [0.9, 0.7, 0.5, 0.3, 0.1, 0.01] {
            let l = truncation_length(1000, lambda, 0.1).unwrap();
            assert!(l <= last);
            last = l;
        }
        assert!(truncation_length(1000, 0.5, 0.2).unwrap() <= 19);
        assert_eq!(truncation_length(1, 1e-9, 1e6).unwrap(), 0);
        assert!(truncation_length(10, 1.0, 0.1).is_err());
        assert!(truncation_length(10, 0.5, 0.0).is_err());
    }

    #[test]
    fn push_level_zero() {
        let b = push_beta(&complete(3), 0, 1, 0, None).unwrap();
        assert!((b.value - 0.5).abs() < 1e-15);
        assert_eq!(b.level, Some(0));
        assert_eq!(b.residual_bound, None);
    }

    #[test]
    fn push_converges_on_triangle() {
        let b = push_beta(&complete(3), 0, 2, 100, Some(0.5)).unwrap();
        assert!((b.value - 2.0 / 9.0).abs() < 1e-9);
        assert!(b.residual_bound.unwrap() < 1e-25);
    }

    #[test]
    fn push_counts_each_directed_edge_once_per_level() {
        let g = complete(6);
        let mut st = TruncatedSeriesState::new(&g, 0, 3).unwrap();
        for level in 1..=5u64 {
            st.step(&g, Execution::Sequential);
            assert_eq!(st.operations(), level * 2 * g.edge_count() as u64);
        }
        assert_eq!(st.level, 5);
    }

    #[test]
    fn push_policies_agree() {
        let g = complete(7);
        let a = push_beta_with(&g, 1, 4, 30, None, Execution::Parallel).unwrap();
        let b = push_beta_with(&g, 1, 4, 30, None, Execution::Sequential).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }
}
