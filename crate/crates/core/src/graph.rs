//! Immutable CSR storage for undirected simple graphs.
//!
//! Node ids read from an edge list are compacted to `0..n` in first-seen
//! order; the original ids are retained so callers can translate queries.

use std::collections::{HashMap, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::RngCore;
use serde::Serialize;

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Counters collected while ingesting an edge list.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub duplicate_edges_removed: u64,
    pub self_loops_removed: u64,
}

#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    degrees: Vec<u32>,
    d_min: u32,
    d_max: u32,
    original_ids: Vec<u64>,
    ingest: IngestStats,
}

/// Structural equality; ingestion counters are provenance and do not take part.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.offsets == other.offsets && self.neighbors == other.neighbors && self.original_ids == other.original_ids
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub connected: bool,
    pub bipartite: bool,
    pub node_count: usize,
    pub edge_count: usize,
    pub duplicate_edges_removed: u64,
    pub self_loops_removed: u64,
}

impl ValidationReport {
    /// Connected and non-bipartite, i.e. the simple random walk is ergodic.
    pub fn is_ergodic(&self) -> bool {
        self.connected && !self.bipartite
    }

    /// Refuses disconnected or bipartite graphs unless `allow_override` is
    /// set, in which case the problems come back as warnings.
    pub fn check_queryable(&self, allow_override: bool) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if !self.connected {
            if !allow_override {
                return Err(Error::Disconnected);
            }
            warnings.push("graph is disconnected; the random walk is not ergodic".to_string());
        }
        if self.bipartite {
            if !allow_override {
                return Err(Error::Bipartite);
            }
            warnings.push("graph is bipartite; truncation bounds do not apply".to_string());
        }
        Ok(warnings)
    }
}

struct Interner {
    map: HashMap<u64, NodeId>,
    ids: Vec<u64>,
}

impl Interner {
    fn new() -> Self {
        Self { map: HashMap::new(), ids: Vec::new() }
    }

    fn intern(&mut self, ext: u64) -> Result<NodeId> {
        if let Some(&id) = self.map.get(&ext) {
            return Ok(id);
        }
        let id =
            NodeId::try_from(self.ids.len()).map_err(|_| Error::GraphTooLarge("more than 2^32 - 1 nodes".into()))?;
        self.map.insert(ext, id);
        self.ids.push(ext);
        Ok(id)
    }
}

impl Graph {
    /// Parses a whitespace-separated edge list. Lines starting with `#` are
    /// comments; tokens after the first two on a line are ignored.
    pub fn from_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
        let mut interner = Interner::new();
        let mut edges = Vec::new();
        let mut self_loops = 0u64;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let lineno = idx + 1;
            let mut tokens = trimmed.split_whitespace();
            let mut next_id = || -> Result<u64> {
                let tok = tokens
                    .next()
                    .ok_or_else(|| Error::Parse { line: lineno, message: "expected two node ids".into() })?;
                tok.parse::<u64>()
                    .map_err(|_| Error::Parse { line: lineno, message: format!("invalid node id {tok:?}") })
            };
            let (a, b) = (next_id()?, next_id()?);
            let u = interner.intern(a)?;
            let v = interner.intern(b)?;
            if u == v {
                self_loops += 1;
            } else {
                edges.push((u, v));
            }
        }
        if interner.ids.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut graph = Graph::build(interner.ids, edges)?;
        graph.ingest.self_loops_removed = self_loops;
        Ok(graph)
    }

    pub fn from_edge_list_str(text: &str) -> Result<Graph> {
        Graph::from_edge_list(text.as_bytes())
    }

    /// Builds a graph on nodes `0..n` (original ids equal dense ids).
    /// Self-loops are dropped and duplicate edges merged.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > NodeId::MAX as usize {
            return Err(Error::GraphTooLarge(format!("{n} nodes")));
        }
        let mut kept = Vec::with_capacity(edges.len());
        let mut self_loops = 0;
        for &(u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(Error::NodeOutOfRange(u64::from(w)));
                }
            }
            if u == v {
                self_loops += 1;
            } else {
                kept.push((u, v));
            }
        }
        let mut graph = Graph::build((0..n as u64).collect(), kept)?;
        graph.ingest.self_loops_removed = self_loops;
        Ok(graph)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Graph> {
        let mut file = BufReader::new(File::open(path)?);
        let is_cache = {
            let head = file.fill_buf()?;
            head.len() >= CACHE_MAGIC.len() && head[..CACHE_MAGIC.len()] == CACHE_MAGIC
        };
        if is_cache {
            Graph::read_cache(file)
        } else {
            Graph::from_edge_list(file)
        }
    }

    fn build(original_ids: Vec<u64>, mut edges: Vec<(NodeId, NodeId)>) -> Result<Graph> {
        let n = original_ids.len();
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        let duplicates = (before - edges.len()) as u64;

        let mut degrees = vec![0u32; n];
        for &(u, v) in &edges {
            degrees[u as usize] += 1;
            degrees[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        for &d in &degrees {
            offsets.push(offsets.last().unwrap() + d as usize);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut neighbors = vec![0 as NodeId; 2 * edges.len()];
        for &(u, v) in &edges {
            neighbors[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            neighbors[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        let d_min = degrees.iter().copied().min().unwrap_or(0);
        let d_max = degrees.iter().copied().max().unwrap_or(0);
        Ok(Graph {
            offsets,
            neighbors,
            degrees,
            d_min,
            d_max,
            original_ids,
            ingest: IngestStats { duplicate_edges_removed: duplicates, self_loops_removed: 0 },
        })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> u32 {
        self.degrees[v as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_array(&self) -> &[NodeId] {
        &self.neighbors
    }

    pub fn min_degree(&self) -> u32 {
        self.d_min
    }

    pub fn max_degree(&self) -> u32 {
        self.d_max
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn ingest_stats(&self) -> IngestStats {
        self.ingest
    }

    pub fn original_id(&self, v: NodeId) -> u64 {
        self.original_ids[v as usize]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    /// Dense id of an external node id. Linear scan; intended for CLI lookups.
    pub fn dense_id(&self, original: u64) -> Option<NodeId> {
        self.original_ids.iter().position(|&x| x == original).map(|i| i as NodeId)
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange(u64::from(v)))
        }
    }

    /// Uniform neighbor of `v`, using exactly one draw from `rng` in the
    /// common case (rejection happens with probability below `d_v / 2^32`).
    pub fn sample_neighbor<R: RngCore + ?Sized>(&self, v: NodeId, rng: &mut R) -> Result<NodeId> {
        self.check_node(v)?;
        if self.degree(v) == 0 {
            return Err(Error::IsolatedNode(v));
        }
        Ok(self.step(v, rng))
    }

    /// Unchecked walk step; `v` must be a valid non-isolated node.
    #[inline(always)]
    pub(crate) fn step<R: RngCore + ?Sized>(&self, v: NodeId, rng: &mut R) -> NodeId {
        let v = v as usize;
        let start = self.offsets[v];
        let d = self.degrees[v];
        self.neighbors[start + uniform_below(d, rng) as usize]
    }

    /// Connectivity by BFS from node 0, bipartiteness by BFS 2-coloring of
    /// every component.
    pub fn validate(&self) -> ValidationReport {
        let n = self.node_count();
        let mut color = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        let mut bipartite = true;
        let mut components = 0usize;
        for root in 0..n {
            if color[root] != u8::MAX {
                continue;
            }
            components += 1;
            color[root] = 0;
            queue.push_back(root as NodeId);
            while let Some(u) = queue.pop_front() {
                let cu = color[u as usize];
                for &w in self.neighbors(u) {
                    let cw = &mut color[w as usize];
                    if *cw == u8::MAX {
                        *cw = 1 - cu;
                        queue.push_back(w);
                    } else if *cw == cu {
                        bipartite = false;
                    }
                }
            }
        }
        ValidationReport {
            connected: components == 1,
            bipartite,
            node_count: n,
            edge_count: self.edge_count(),
            duplicate_edges_removed: self.ingest.duplicate_edges_removed,
            self_loops_removed: self.ingest.self_loops_removed,
        }
    }

    /// Component labels in `0..count`, numbered by smallest member.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let n = self.node_count();
        let mut label = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut queue = VecDeque::new();
        for root in 0..n {
            if label[root] != u32::MAX {
                continue;
            }
            label[root] = count;
            queue.push_back(root as NodeId);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    /// Induced subgraph on the largest connected component (ties go to the
    /// component containing the smallest node). Relative node order is kept.
    pub fn largest_component(&self) -> Graph {
        let (label, count) = self.components();
        if count <= 1 {
            return self.clone();
        }
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l as usize] += 1;
        }
        let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap() as u32;
        let mut remap = vec![NodeId::MAX; self.node_count()];
        let mut ids = Vec::with_capacity(sizes[best as usize]);
        for (v, &l) in label.iter().enumerate() {
            if l == best {
                remap[v] = ids.len() as NodeId;
                ids.push(self.original_ids[v]);
            }
        }
        let mut edges = Vec::new();
        for u in 0..self.node_count() as NodeId {
            if label[u as usize] != best {
                continue;
            }
            for &w in self.neighbors(u) {
                if u < w {
                    edges.push((remap[u as usize], remap[w as usize]));
                }
            }
        }
        let mut g = Graph::build(ids, edges).expect("component of a valid graph");
        g.ingest = self.ingest;
        g
    }

    /// Writes the graph as an edge list using original ids. Lines are ordered
    /// so that reloading reproduces the same dense numbering: each node is
    /// first introduced in id order (isolated nodes via a self-loop line),
    /// then the remaining edges follow sorted.
    pub fn write_edge_list<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        let n = self.node_count();
        let mut introduced = vec![false; n];
        let mut written = std::collections::HashSet::new();
        let emit = |out: &mut BufWriter<W>, a: NodeId, b: NodeId| -> Result<()> {
            writeln!(out, "{} {}", self.original_ids[a as usize], self.original_ids[b as usize])?;
            Ok(())
        };
        for w in 0..n as NodeId {
            if introduced[w as usize] {
                continue;
            }
            let nbrs = self.neighbors(w);
            if let Some(&x) = nbrs.first().filter(|&&x| x < w) {
                emit(&mut out, x, w)?;
                written.insert((x, w));
            } else if nbrs.binary_search(&(w + 1)).is_ok() {
                emit(&mut out, w, w + 1)?;
                written.insert((w, w + 1));
                introduced[(w + 1) as usize] = true;
            } else {
                // No plain edge can introduce `w` next (isolated, or all
                // neighbors come later); a self-loop line registers it and
                // is dropped again on ingestion.
                emit(&mut out, w, w)?;
            }
            introduced[w as usize] = true;
        }
        for u in 0..n as NodeId {
            for &w in self.neighbors(u) {
                if u < w && !written.contains(&(u, w)) {
                    emit(&mut out, u, w)?;
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_cache<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        out.write_all(&CACHE_MAGIC)?;
        out.write_all(&CACHE_VERSION.to_le_bytes())?;
        out.write_all(&(self.node_count() as u64).to_le_bytes())?;
        out.write_all(&(self.edge_count() as u64).to_le_bytes())?;
        for &o in &self.offsets {
            out.write_all(&(o as u64).to_le_bytes())?;
        }
        for &w in &self.neighbors {
            out.write_all(&w.to_le_bytes())?;
        }
        for &id in &self.original_ids {
            out.write_all(&id.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut input: R) -> Result<Graph> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if magic != CACHE_MAGIC {
            return Err(Error::CacheFormat("bad magic bytes".into()));
        }
        let version = read_u32(&mut input)?;
        if version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!("unsupported version {version}")));
        }
        let n = read_u64(&mut input)? as usize;
        let m = read_u64(&mut input)? as usize;
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if n > NodeId::MAX as usize {
            return Err(Error::CacheFormat(format!("node count {n} too large")));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            offsets.push(read_u64(&mut input)? as usize);
        }
        let mut neighbors = Vec::with_capacity(2 * m);
        for _ in 0..2 * m {
            neighbors.push(read_u32(&mut input)?);
        }
        let mut original_ids = Vec::with_capacity(n);
        for _ in 0..n {
            original_ids.push(read_u64(&mut input)?);
        }
        Graph::from_csr_parts(offsets, neighbors, original_ids)
    }

    /// Assembles a graph from raw CSR arrays, checking every invariant.
    pub fn from_csr_parts(offsets: Vec<usize>, neighbors: Vec<NodeId>, original_ids: Vec<u64>) -> Result<Graph> {
        let n = original_ids.len();
        let bad = |msg: String| Err(Error::CacheFormat(msg));
        if offsets.len() != n + 1 || offsets[0] != 0 || offsets[n] != neighbors.len() {
            return bad("offsets do not describe the neighbor array".into());
        }
        if !neighbors.len().is_multiple_of(2) {
            return bad("odd adjacency length".into());
        }
        let mut degrees = Vec::with_capacity(n);
        for v in 0..n {
            if offsets[v + 1] < offsets[v] {
                return bad(format!("offsets decrease at node {v}"));
            }
            let list = &neighbors[offsets[v]..offsets[v + 1]];
            for (i, &w) in list.iter().enumerate() {
                if w as usize >= n {
                    return bad(format!("neighbor {w} of node {v} out of range"));
                }
                if w as usize == v {
                    return bad(format!("self-loop at node {v}"));
                }
                if i > 0 && list[i - 1] >= w {
                    return bad(format!("adjacency of node {v} not strictly ascending"));
                }
            }
            degrees.push(list.len() as u32);
        }
        let mut ids = std::collections::HashSet::with_capacity(n);
        if let Some(dup) = original_ids.iter().find(|&&id| !ids.insert(id)) {
            return bad(format!("duplicate original id {dup}"));
        }
        let graph = Graph {
            d_min: degrees.iter().copied().min().unwrap_or(0),
            d_max: degrees.iter().copied().max().unwrap_or(0),
            offsets,
            neighbors,
            degrees,
            original_ids,
            ingest: IngestStats::default(),
        };
        for u in 0..n as NodeId {
            for &w in graph.neighbors(u) {
                if graph.neighbors(w).binary_search(&u).is_err() {
                    return bad(format!("edge {u}-{w} is not symmetric"));
                }
            }
        }
        Ok(graph)
    }
}

pub(crate) const CACHE_MAGIC: [u8; 8] = *b"PWCSR\0\0\0";
pub(crate) const CACHE_VERSION: u32 = 1;

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Exactly uniform integer in `0..range` (Lemire's multiply-and-reject).
#[inline(always)]
pub(crate) fn uniform_below<R: RngCore + ?Sized>(range: u32, rng: &mut R) -> u32 {
    debug_assert!(range > 0);
    let mut m = u64::from(rng.next_u32()) * u64::from(range);
    let mut low = m as u32;
    if low < range {
        let threshold = range.wrapping_neg() % range;
        while low < threshold {
            m = u64::from(rng.next_u32()) * u64::from(range);
            low = m as u32;
        }
    }
    (m >> 32) as u32
}
