//! Dense, independently coded oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use probewalk::generate::{ergodic_test_graph, TestGraphKind};
use probewalk::Graph;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub fn laplacian(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut l = DMatrix::zeros(n, n);
    for v in 0..n {
        l[(v, v)] = f64::from(g.degree(v as u32));
        for &u in g.neighbors(v as u32) {
            l[(v, u as usize)] = -1.0;
        }
    }
    l
}

/// `β(s,t) = Σ_{μ_i > 0} (u_iᵀ b)² / μ_i²` from a full eigendecomposition of L.
pub fn eigen_beta(g: &Graph, s: u32, t: u32) -> f64 {
    let eig = laplacian(g).symmetric_eigen();
    let mut beta = 0.0;
    for (i, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu.abs() < 1e-9 {
            continue;
        }
        let c = eig.eigenvectors[(s as usize, i)] - eig.eigenvectors[(t as usize, i)];
        beta += c * c / (mu * mu);
    }
    beta
}

/// All-pairs version of [`eigen_beta`]: returns the matrix `L^{2†}`.
pub fn squared_pseudoinverse(g: &Graph) -> DMatrix<f64> {
    let eig = laplacian(g).symmetric_eigen();
    let n = g.node_count();
    let mut out = DMatrix::zeros(n, n);
    for (i, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu.abs() < 1e-9 {
            continue;
        }
        let u = eig.eigenvectors.column(i);
        out += (u * u.transpose()) / (mu * mu);
    }
    out
}

pub fn pair_beta(l2: &DMatrix<f64>, s: usize, t: usize) -> f64 {
    l2[(s, s)] + l2[(t, t)] - 2.0 * l2[(s, t)]
}

/// `P = D⁻¹A`.
pub fn transition(g: &Graph) -> DMatrix<f64> {
    let n = g.node_count();
    let mut p = DMatrix::zeros(n, n);
    for v in 0..n {
        let d = f64::from(g.degree(v as u32));
        for &u in g.neighbors(v as u32) {
            p[(v, u as usize)] = 1.0 / d;
        }
    }
    p
}

/// `h^{(L)} = Σ_{i≤L} Pⁱ D⁻¹ b_st` by explicit matrix powers.
pub fn dense_h(g: &Graph, s: u32, t: u32, level: usize) -> DVector<f64> {
    let n = g.node_count();
    let p = transition(g);
    let mut term = DVector::zeros(n);
    term[s as usize] = 1.0 / f64::from(g.degree(s));
    term[t as usize] = -1.0 / f64::from(g.degree(t));
    let mut h = term.clone();
    for _ in 0..level {
        term = &p * term;
        h += &term;
    }
    h
}

pub fn dense_truncated_beta(g: &Graph, s: u32, t: u32, level: usize) -> f64 {
    let h = dense_h(g, s, t, level);
    let total = h.sum();
    h.norm_squared() - total * total / g.node_count() as f64
}

/// Mixing factor from a dense eigensolve of `D^{-1/2} A D^{-1/2}`.
pub fn dense_lambda(g: &Graph) -> f64 {
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

/// `count` seeded connected non-bipartite graphs with `n ∈ [lo, hi]`,
/// alternating Erdős–Rényi and power-law.
pub fn graph_suite(count: usize, lo: usize, hi: usize, seed: u64) -> Vec<Graph> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let n = rng.random_range(lo..=hi);
            let kind = if i % 2 == 0 { TestGraphKind::ErdosRenyi } else { TestGraphKind::PowerLaw };
            ergodic_test_graph(kind, n, rng.random()).unwrap()
        })
        .collect()
}

/// `P4` plus the chord `0–2`: small, irregular, non-bipartite.
pub fn p4_chord() -> Graph {
    Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (0, 2)]).unwrap()
}

pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn sample_variance(values: &[f64]) -> f64 {
    mean_and_se(values).1.powi(2) * values.len() as f64
}

/// Empirical `E[z zᵀ]` over probes `0..count` of the family `(seed, n)`.
pub fn probe_second_moment(seed: u64, n: usize, count: u64) -> DMatrix<f64> {
    let fam = probewalk::ProbeFamily::new(seed, n as u64).unwrap();
    let mut acc = DMatrix::<i64>::zeros(n, n);
    let mut z = vec![0i64; n];
    for k in 0..count {
        let pk = fam.key(k);
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = i64::from(pk.entry(i as u64).unwrap());
        }
        for i in 0..n {
            if z[i] == 0 {
                continue;
            }
            for j in i..n {
                acc[(i, j)] += z[i] * z[j];
            }
        }
    }
    let mut m = acc.map(|x| x as f64 / count as f64);
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    m
}

/// The idealised probe law at `n = 3`, by enumeration: zero slot uniform,
/// the other two opposite with a fair sign. Returns (vector, probability).
pub fn ideal_probes_n3() -> Vec<([i8; 3], f64)> {
    let mut out = Vec::new();
    for zero in 0..3 {
        for sign in [1i8, -1] {
            let mut z = [0i8; 3];
            let others: Vec<usize> = (0..3).filter(|&i| i != zero).collect();
            z[others[0]] = sign;
            z[others[1]] = -sign;
            out.push((z, 1.0 / 6.0));
        }
    }
    out
}
