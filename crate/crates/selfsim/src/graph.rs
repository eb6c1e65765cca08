//! Graph, bijection, and certificate types with canonical representations.
//!
//! Everything downstream (the exact oracle, the constructive bounds, the
//! greedy mapper, the pipeline driver) produces or consumes these types, and
//! [`verify_certificate`] is the single trust anchor: no certificate size is
//! ever reported without passing it.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Vertices are dense integers `0..n`.
pub type Vertex = usize;

/// An undirected edge, stored canonically as `(min, max)`.
pub type Edge = (Vertex, Vertex);

/// Normalize an endpoint pair into canonical `(min, max)` form.
pub fn canon(u: Vertex, v: Vertex) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop edge ({0}, {0})")]
    Loop(Vertex),
    #[error("endpoint {vertex} out of range for n = {n}")]
    EndpointOutOfRange { vertex: Vertex, n: usize },
}

/// An undirected simple graph: a vertex count and a canonical sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Build a graph from raw endpoint pairs.
    ///
    /// Duplicate pairs (in either orientation) collapse to one edge; loops
    /// and out-of-range endpoints are rejected.
    ///
    /// ```
    /// use selfsim::graph::Graph;
    /// let g = Graph::build(3, &[(0, 1), (1, 0), (1, 2)]).unwrap();
    /// assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    /// ```
    pub fn build(n: usize, raw_edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut edges = Vec::with_capacity(raw_edges.len());
        for &(u, v) in raw_edges {
            if u == v {
                return Err(GraphError::Loop(u));
            }
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::EndpointOutOfRange { vertex: w, n });
                }
            }
            edges.push(canon(u, v));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_canonical(n, edges))
    }

    /// Assemble from an already canonical (sorted, deduped, loop-free) edge list.
    pub(crate) fn from_canonical(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u < v && v < n));
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Self { n, edges, adj }
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_canonical(n, edges)
    }

    /// Path `0-1-...-(n-1)`.
    pub fn path(n: usize) -> Self {
        let edges = (0..n.saturating_sub(1)).map(|u| (u, u + 1)).collect();
        Self::from_canonical(n, edges)
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut edges: Vec<Edge> = (0..n - 1).map(|u| (u, u + 1)).collect();
        edges.push((0, n - 1));
        edges.sort_unstable();
        Self::from_canonical(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The canonical sorted edge list.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && self.adj[u].binary_search(&v).is_ok()
    }

    /// Adjacency as fixed-size bitsets, one row per vertex.
    ///
    /// Agrees with [`Graph::neighbors`] by construction; callers pick
    /// whichever view suits the operation.
    pub fn adjacency_bitsets(&self) -> Vec<Bitset> {
        let mut rows = vec![Bitset::new(self.n); self.n];
        for &(u, v) in &self.edges {
            rows[u].insert(v);
            rows[v].insert(u);
        }
        rows
    }

    /// Edge set as a hash set, for O(1) membership tests.
    pub fn edge_set(&self) -> HashSet<Edge> {
        self.edges.iter().copied().collect()
    }

    /// Subgraph induced by `keep`, relabeled to `0..keep.len()`.
    ///
    /// Returns the new graph together with the index map `new -> old`, so
    /// certificates on the induced graph lift back to this one.
    pub fn induced_subgraph(&self, keep: &[Vertex]) -> (Graph, Vec<Vertex>) {
        let mut keep: Vec<Vertex> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut old_to_new = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old] = new;
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            let (nu, nv) = (old_to_new[u], old_to_new[v]);
            if nu != usize::MAX && nv != usize::MAX {
                edges.push(canon(nu, nv));
            }
        }
        edges.sort_unstable();
        (Graph::from_canonical(keep.len(), edges), keep)
    }

    /// Drop isolated vertices, relabeling the rest; returns the `new -> old` map.
    pub fn remove_isolated(&self) -> (Graph, Vec<Vertex>) {
        let keep: Vec<Vertex> = (0..self.n).filter(|&v| self.degree(v) > 0).collect();
        self.induced_subgraph(&keep)
    }
}

/// A fixed-capacity bitset over vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitset {
    blocks: Vec<u64>,
    len: usize,
}

impl Bitset {
    pub fn new(capacity: usize) -> Self {
        Self {
            blocks: vec![0; capacity.div_ceil(64)],
            len: capacity,
        }
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.blocks[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.blocks[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn intersection_count(&self, other: &Bitset) -> usize {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.contains(i))
    }
}

/// A bipartite restriction of a parent graph: the edges with one endpoint in
/// each of two disjoint vertex sets.
#[derive(Debug, Clone)]
pub struct BipartiteView {
    part_a: Vec<Vertex>,
    part_b: Vec<Vertex>,
    edges: Vec<Edge>,
    in_a: HashSet<Vertex>,
    in_b: HashSet<Vertex>,
    adj_a: HashMap<Vertex, Vec<Vertex>>,
    adj_b: HashMap<Vertex, Vec<Vertex>>,
}

impl BipartiteView {
    /// Collect the edges of `g` crossing between `part_a` and `part_b`.
    ///
    /// Panics if the parts are not disjoint.
    pub fn new(g: &Graph, part_a: &[Vertex], part_b: &[Vertex]) -> Self {
        let in_a: HashSet<Vertex> = part_a.iter().copied().collect();
        let in_b: HashSet<Vertex> = part_b.iter().copied().collect();
        assert!(
            in_a.is_disjoint(&in_b),
            "bipartite parts must be disjoint"
        );
        let edges: Vec<Edge> = g
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| {
                (in_a.contains(&u) && in_b.contains(&v)) || (in_b.contains(&u) && in_a.contains(&v))
            })
            .collect();
        let mut adj_a: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
        let mut adj_b: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
        for &(u, v) in &edges {
            let (a, b) = if in_a.contains(&u) { (u, v) } else { (v, u) };
            adj_a.entry(a).or_default().push(b);
            adj_b.entry(b).or_default().push(a);
        }
        for list in adj_a.values_mut().chain(adj_b.values_mut()) {
            list.sort_unstable();
        }
        let mut part_a = part_a.to_vec();
        let mut part_b = part_b.to_vec();
        part_a.sort_unstable();
        part_b.sort_unstable();
        Self {
            part_a,
            part_b,
            edges,
            in_a,
            in_b,
            adj_a,
            adj_b,
        }
    }

    pub fn part_a(&self) -> &[Vertex] {
        &self.part_a
    }

    pub fn part_b(&self) -> &[Vertex] {
        &self.part_b
    }

    /// Crossing edges, canonical and sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains_a(&self, v: Vertex) -> bool {
        self.in_a.contains(&v)
    }

    pub fn contains_b(&self, v: Vertex) -> bool {
        self.in_b.contains(&v)
    }

    /// Each crossing edge oriented as `(a-side endpoint, b-side endpoint)`.
    pub fn oriented_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().map(move |&(u, v)| {
            if self.in_a.contains(&u) {
                (u, v)
            } else {
                (v, u)
            }
        })
    }

    /// B-side neighbors of an A-side vertex, ascending.
    pub fn neighbors_of_a(&self, a: Vertex) -> &[Vertex] {
        self.adj_a.get(&a).map_or(&[], Vec::as_slice)
    }

    /// A-side neighbors of a B-side vertex, ascending.
    pub fn neighbors_of_b(&self, b: Vertex) -> &[Vertex] {
        self.adj_b.get(&b).map_or(&[], Vec::as_slice)
    }

    pub fn average_degree_a(&self) -> f64 {
        if self.part_a.is_empty() {
            0.0
        } else {
            self.edges.len() as f64 / self.part_a.len() as f64
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BijectionError {
    #[error("target {target} already has preimage {existing}")]
    TargetInUse { target: Vertex, existing: Vertex },
    #[error("source {0} already mapped")]
    SourceInUse(Vertex),
    #[error("source {0} not in bijection domain")]
    MissingSource(Vertex),
}

/// An injective partial map between vertex sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexBijection {
    forward: BTreeMap<Vertex, Vertex>,
    backward: BTreeMap<Vertex, Vertex>,
}

impl VertexBijection {
    pub fn new() -> Self {
        Self::default()
    }

    /// The identity map on `domain`.
    pub fn identity(domain: impl IntoIterator<Item = Vertex>) -> Self {
        let mut f = Self::new();
        for v in domain {
            f.insert(v, v).expect("identity is injective");
        }
        f
    }

    /// From explicit `(source, target)` pairs; rejects non-injective input.
    pub fn from_pairs(pairs: &[(Vertex, Vertex)]) -> Result<Self, BijectionError> {
        let mut f = Self::new();
        for &(s, t) in pairs {
            f.insert(s, t)?;
        }
        Ok(f)
    }

    pub fn insert(&mut self, source: Vertex, target: Vertex) -> Result<(), BijectionError> {
        if self.forward.contains_key(&source) {
            return Err(BijectionError::SourceInUse(source));
        }
        if let Some(&existing) = self.backward.get(&target) {
            return Err(BijectionError::TargetInUse { target, existing });
        }
        self.forward.insert(source, target);
        self.backward.insert(target, source);
        Ok(())
    }

    pub fn get(&self, source: Vertex) -> Option<Vertex> {
        self.forward.get(&source).copied()
    }

    pub fn preimage(&self, target: Vertex) -> Option<Vertex> {
        self.backward.get(&target).copied()
    }

    pub fn contains_source(&self, source: Vertex) -> bool {
        self.forward.contains_key(&source)
    }

    pub fn contains_target(&self, target: Vertex) -> bool {
        self.backward.contains_key(&target)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Pairs in ascending source order.
    pub fn iter(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.forward.iter().map(|(&s, &t)| (s, t))
    }

    /// Merge another bijection into this one; fails on any clash.
    pub fn extend_with(&mut self, other: &VertexBijection) -> Result<(), BijectionError> {
        for (s, t) in other.iter() {
            self.insert(s, t)?;
        }
        Ok(())
    }

    /// Endpoint-wise image of an edge; `None` if an endpoint is unmapped.
    pub fn map_edge(&self, e: Edge) -> Option<Edge> {
        Some(canon(self.get(e.0)?, self.get(e.1)?))
    }

    /// Relabel both sides through `new -> old` index maps (certificate lifting).
    pub fn relabel(&self, source_map: &[Vertex], target_map: &[Vertex]) -> VertexBijection {
        let mut out = VertexBijection::new();
        for (s, t) in self.iter() {
            out.insert(source_map[s], target_map[t])
                .expect("relabeling an injection through injective maps stays injective");
        }
        out
    }
}

/// `|f(g1) ∩ g2|`, mapping each edge of `g1` endpoint-wise through `f`.
///
/// Errors if some endpoint of `g1` is outside the domain of `f`.
pub fn overlap_count(
    f: &VertexBijection,
    g1: &[Edge],
    g2: &[Edge],
) -> Result<usize, BijectionError> {
    let target: HashSet<Edge> = g2.iter().copied().collect();
    let mut count = 0;
    for &e in g1 {
        for v in [e.0, e.1] {
            if !f.contains_source(v) {
                return Err(BijectionError::MissingSource(v));
            }
        }
        let mapped = f.map_edge(e).expect("both endpoints checked");
        if target.contains(&mapped) {
            count += 1;
        }
    }
    Ok(count)
}

/// The verifiable output of every lower-bound routine: two edge-disjoint
/// subgraphs of the host graph and the bijection witnessing their isomorphism.
#[derive(Debug, Clone)]
pub struct SimilarityCertificate {
    pub e1: Vec<Edge>,
    pub e2: Vec<Edge>,
    pub f: VertexBijection,
    pub s: usize,
    /// Provenance label naming the construction that produced this.
    pub method: String,
    /// RNG seed used by the construction (0 for deterministic routines).
    pub seed: u64,
}

impl SimilarityCertificate {
    /// The empty certificate, `s = 0`; verifies on every graph.
    pub fn empty(method: impl Into<String>, seed: u64) -> Self {
        Self {
            e1: Vec::new(),
            e2: Vec::new(),
            f: VertexBijection::new(),
            s: 0,
            method: method.into(),
            seed,
        }
    }

    /// Assemble a certificate, canonicalizing and sorting the edge lists.
    pub fn new(
        e1: Vec<Edge>,
        e2: Vec<Edge>,
        f: VertexBijection,
        method: impl Into<String>,
        seed: u64,
    ) -> Self {
        let mut e1: Vec<Edge> = e1.into_iter().map(|(u, v)| canon(u, v)).collect();
        let mut e2: Vec<Edge> = e2.into_iter().map(|(u, v)| canon(u, v)).collect();
        e1.sort_unstable();
        e2.sort_unstable();
        let s = e1.len();
        Self {
            e1,
            e2,
            f,
            s,
            method: method.into(),
            seed,
        }
    }

    /// Lift a certificate found on an induced subgraph back to the parent,
    /// through the `new -> old` index map.
    pub fn lift(&self, index_map: &[Vertex]) -> SimilarityCertificate {
        let remap = |edges: &[Edge]| -> Vec<Edge> {
            edges
                .iter()
                .map(|&(u, v)| canon(index_map[u], index_map[v]))
                .collect()
        };
        SimilarityCertificate::new(
            remap(&self.e1),
            remap(&self.e2),
            self.f.relabel(index_map, index_map),
            self.method.clone(),
            self.seed,
        )
    }
}

/// The first certificate invariant violated, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SizeMismatch { s: usize, e1: usize, e2: usize },
    EdgeNotInGraph { side: u8, edge: Edge },
    NotEdgeDisjoint { edge: Edge },
    MappingMissing { vertex: Vertex },
    ImageMismatch { edge: Edge, image: Edge },
    ImageIncomplete { missing: Edge },
}

impl fmt::Display for Violation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SizeMismatch { s, e1, e2 } => {
                write!(out, "size mismatch: s = {s} but |e1| = {e1}, |e2| = {e2}")
            }
            Violation::EdgeNotInGraph { side, edge } => {
                write!(out, "edge not in graph: e{side} contains {edge:?}")
            }
            Violation::NotEdgeDisjoint { edge } => {
                write!(out, "not edge-disjoint: {edge:?} appears in both e1 and e2")
            }
            Violation::MappingMissing { vertex } => {
                write!(out, "mapping missing for endpoint {vertex} of e1")
            }
            Violation::ImageMismatch { edge, image } => {
                write!(out, "image mismatch: f({edge:?}) = {image:?} is not in e2")
            }
            Violation::ImageIncomplete { missing } => {
                write!(out, "image mismatch: e2 edge {missing:?} is not hit by f(e1)")
            }
        }
    }
}

/// Check every certificate invariant against `g`.
///
/// Returns `Ok(())` on success or the first violated invariant. Verification
/// failure is a value, not an error: callers decide how loudly to complain.
pub fn verify_certificate(g: &Graph, cert: &SimilarityCertificate) -> Result<(), Violation> {
    if cert.e1.len() != cert.s || cert.e2.len() != cert.s {
        return Err(Violation::SizeMismatch {
            s: cert.s,
            e1: cert.e1.len(),
            e2: cert.e2.len(),
        });
    }
    let host = g.edge_set();
    for (side, edges) in [(1u8, &cert.e1), (2u8, &cert.e2)] {
        for &e in edges.iter() {
            if !host.contains(&canon(e.0, e.1)) {
                return Err(Violation::EdgeNotInGraph { side, edge: e });
            }
        }
    }
    let set1: HashSet<Edge> = cert.e1.iter().copied().collect();
    for &e in &cert.e2 {
        if set1.contains(&e) {
            return Err(Violation::NotEdgeDisjoint { edge: e });
        }
    }
    let set2: HashSet<Edge> = cert.e2.iter().copied().collect();
    let mut image = HashSet::with_capacity(cert.e1.len());
    for &e in &cert.e1 {
        for v in [e.0, e.1] {
            if !cert.f.contains_source(v) {
                return Err(Violation::MappingMissing { vertex: v });
            }
        }
        let mapped = cert.f.map_edge(e).expect("endpoints checked");
        if !set2.contains(&mapped) {
            return Err(Violation::ImageMismatch {
                edge: e,
                image: mapped,
            });
        }
        image.insert(mapped);
    }
    // f is injective by construction, so |f(e1)| = |e1| = |e2|; still insist
    // the image covers e2 exactly.
    for &e in &cert.e2 {
        if !image.contains(&e) {
            return Err(Violation::ImageIncomplete { missing: e });
        }
    }
    Ok(())
}
