//! Seeded synthetic graphs and query-pair sampling.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

const MAX_ATTEMPTS: usize = 1000;

pub fn complete(n: usize) -> Result<Graph> {
    let n32 = n as NodeId;
    let edges: Vec<_> = (0..n32).flat_map(|a| (a + 1..n32).map(move |b| (a, b))).collect();
    Graph::from_edges(n, &edges)
}

pub fn path(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..n as NodeId).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    let n32 = n as NodeId;
    let edges: Vec<_> = (0..n32).map(|v| (v, (v + 1) % n32)).collect();
    Graph::from_edges(n, &edges)
}

/// One draw of `G(n, p)`; may be disconnected or contain isolated nodes.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n as NodeId {
        for b in a + 1..n as NodeId {
            if rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// Preferential attachment: a clique on `m + 1` seed nodes, then each new
/// node links to `m` distinct existing nodes chosen proportionally to degree.
/// Connected by construction and non-bipartite for `m ≥ 2`.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || n < m + 1 {
        return Err(Error::InvalidParameter(format!("need 1 <= m < n, got n={n}, m={m}")));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut endpoints: Vec<NodeId> = Vec::new();
    for a in 0..=m as NodeId {
        for b in a + 1..=m as NodeId {
            edges.push((a, b));
            endpoints.extend([a, b]);
        }
    }
    for v in (m + 1) as NodeId..n as NodeId {
        let mut targets = Vec::with_capacity(m);
        while targets.len() < m {
            let u = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&u) {
                targets.push(u);
            }
        }
        for u in targets {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    Graph::from_edges(n, &edges)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestGraphKind {
    ErdosRenyi,
    PowerLaw,
}

/// A connected, non-bipartite graph on exactly `n` nodes. Erdős–Rényi
/// draws use `p = 2 ln n / n` (at least 0.3 for tiny `n`) and are redrawn
/// until ergodic; power-law graphs use preferential attachment with `m = 2`.
pub fn ergodic_test_graph(kind: TestGraphKind, n: usize, seed: u64) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("an ergodic simple graph needs n >= 3, got {n}")));
    }
    for attempt in 0..MAX_ATTEMPTS as u64 {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let g = match kind {
            TestGraphKind::ErdosRenyi => {
                let p = (2.0 * (n as f64).ln() / n as f64).clamp(0.3, 1.0);
                erdos_renyi(n, p, s)?
            }
            TestGraphKind::PowerLaw => barabasi_albert(n, 2.min(n - 1), s)?,
        };
        if g.min_degree() > 0 && g.validate().is_ergodic() {
            return Ok(g);
        }
    }
    Err(Error::InvalidParameter(format!("no ergodic {kind:?} graph with n={n} after {MAX_ATTEMPTS} attempts")))
}

/// `count` distinct unordered pairs `{s, t}`, `s ≠ t`, uniformly without
/// replacement, in draw order (each pair returned as `(min, max)`).
pub fn sample_pairs(n: usize, count: usize, seed: u64) -> Result<Vec<(NodeId, NodeId)>> {
    let total = n as u128 * (n as u128).saturating_sub(1) / 2;
    if count as u128 > total {
        return Err(Error::InvalidParameter(format!("cannot sample {count} distinct pairs from {n} nodes")));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    if count as u128 * 2 > total {
        // dense request: shuffle the full list instead of rejecting
        let mut all: Vec<(NodeId, NodeId)> =
            (0..n as NodeId).flat_map(|a| (a + 1..n as NodeId).map(move |b| (a, b))).collect();
        for i in 0..count {
            let j = rng.random_range(i..all.len());
            all.swap(i, j);
        }
        all.truncate(count);
        return Ok(all);
    }
    while out.len() < count {
        let a = rng.random_range(0..n) as NodeId;
        let b = rng.random_range(0..n) as NodeId;
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if seen.insert(pair) {
            out.push(pair);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_graphs_are_ergodic() {
        for n in [3usize, 5, 17, 120, 300] {
            for kind in [TestGraphKind::ErdosRenyi, TestGraphKind::PowerLaw] {
                let g = ergodic_test_graph(kind, n, 42).unwrap();
                assert_eq!(g.node_count(), n);
                assert!(g.validate().is_ergodic());
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(erdos_renyi(50, 0.1, 3).unwrap(), erdos_renyi(50, 0.1, 3).unwrap());
        assert_eq!(barabasi_albert(50, 3, 3).unwrap(), barabasi_albert(50, 3, 3).unwrap());
    }

    #[test]
    fn pairs_are_distinct() {
        for (n, count) in [(10usize, 45usize), (10, 5), (1000, 100)] {
            let pairs = sample_pairs(n, count, 9).unwrap();
            assert_eq!(pairs.len(), count);
            let set: HashSet<_> = pairs.iter().copied().collect();
            assert_eq!(set.len(), count);
            assert!(pairs.iter().all(|&(a, b)| a < b && (b as usize) < n));
        }
        assert!(sample_pairs(4, 7, 0).is_err());
        assert_eq!(sample_pairs(1000, 20, 5).unwrap(), sample_pairs(1000, 20, 5).unwrap());
    }

    #[test]
    fn pair_sampling_is_roughly_uniform() {
        let mut counts = [0u32; 6];
        let index = |p: (u32, u32)| match p {
            (0, 1) => 0,
            (0, 2) => 1,
            (0, 3) => 2,
            (1, 2) => 3,
            (1, 3) => 4,
            _ => 5,
        };
        for seed in 0..6000 {
            counts[index(sample_pairs(4, 1, seed).unwrap()[0])] += 1;
        }
        assert!(counts.iter().all(|&c| (800..1200).contains(&c)), "{counts:?}");
    }
}
