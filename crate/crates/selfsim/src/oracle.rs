//! Exact computation of the self-similarity of small graphs.
//!
//! The reduction: any bijection between two vertex subsets of the same graph
//! extends to a permutation of the whole vertex set, so the optimum over
//! certificates equals the optimum over total permutations of the best
//! edge-disjoint set `S` with `perm(S)` inside the edge set. For one fixed
//! permutation the edges fall into chains and cycles under the edge map, and
//! each component is solved by a no-two-consecutive selection.

use thiserror::Error;

use crate::graph::{
    canon, Edge, Graph, SimilarityCertificate, Vertex, VertexBijection,
};

/// Default cap on `n` for [`iso_exact`]; `9! = 362880` permutations.
pub const DEFAULT_ORACLE_CAP: usize = 9;

/// Edge cap for the independent cross-validation oracle.
pub const NAIVE_EDGE_CAP: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("input is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("vertex count {n} exceeds oracle cap {cap}; raise the cap to force the {n}!-permutation search")]
    CapExceeded { n: usize, cap: usize },
    #[error("edge count {m} exceeds naive-oracle cap {cap}")]
    TooManyEdges { m: usize, cap: usize },
}

/// The maximal chains and cycles of the edge map `e -> perm(e)` within `E(G)`.
///
/// Every edge appears in exactly one chain or cycle; consecutive elements
/// satisfy `perm(e_i) = e_{i+1}` endpoint-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrbitDecomposition {
    pub chains: Vec<Vec<Edge>>,
    pub cycles: Vec<Vec<Edge>>,
}

fn check_permutation(n: usize, perm: &[Vertex]) -> Result<(), OracleError> {
    if perm.len() != n {
        return Err(OracleError::NotAPermutation(n));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(OracleError::NotAPermutation(n));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Successor indices of each edge under `perm`, or `usize::MAX` when the
/// image leaves the edge set.
fn edge_successors(g: &Graph, perm: &[Vertex]) -> Vec<usize> {
    let edges = g.edges();
    let index_of = |e: Edge| edges.binary_search(&e).ok();
    edges
        .iter()
        .map(|&(u, v)| {
            let img = canon(perm[u], perm[v]);
            if g.has_edge(img.0, img.1) {
                index_of(img).expect("image edge present in edge list")
            } else {
                usize::MAX
            }
        })
        .collect()
}

/// Decompose `E(G)` into chains and cycles of the edge map induced by `perm`.
pub fn decompose_orbits(
    g: &Graph,
    perm: &[Vertex],
) -> Result<EdgeOrbitDecomposition, OracleError> {
    check_permutation(g.vertex_count(), perm)?;
    let edges = g.edges();
    let succ = edge_successors(g, perm);
    let m = edges.len();
    let mut has_pred = vec![false; m];
    for &s in &succ {
        if s != usize::MAX {
            has_pred[s] = true;
        }
    }
    let mut visited = vec![false; m];
    let mut chains = Vec::new();
    let mut cycles = Vec::new();
    // Chains start at edges with no predecessor in E.
    for start in 0..m {
        if has_pred[start] || visited[start] {
            continue;
        }
        let mut chain = Vec::new();
        let mut cur = start;
        loop {
            visited[cur] = true;
            chain.push(edges[cur]);
            if succ[cur] == usize::MAX {
                break;
            }
            cur = succ[cur];
        }
        chains.push(chain);
    }
    // Everything left lies on cycles.
    for start in 0..m {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        while !visited[cur] {
            visited[cur] = true;
            cycle.push(edges[cur]);
            cur = succ[cur];
        }
        cycles.push(cycle);
    }
    Ok(EdgeOrbitDecomposition { chains, cycles })
}

/// Value of the best selection on one chain of length `k`:
/// positions `1..k` are eligible (the image of the last edge leaves `E`),
/// no two consecutive.
fn chain_value(k: usize) -> usize {
    k / 2
}

/// Best selection on a cycle of length `k`: no two cyclically consecutive.
fn cycle_value(k: usize) -> usize {
    k / 2
}

/// Alternate positions realizing `chain_value` / `cycle_value`.
fn select_alternating(component: &[Edge], is_cycle: bool) -> Vec<Edge> {
    let k = component.len();
    let eligible = if is_cycle { k } else { k.saturating_sub(1) };
    let take = k / 2;
    // Positions 0, 2, 4, ... among the eligible prefix; on a cycle of odd
    // length stop before wrapping onto position 0's predecessor.
    (0..eligible)
        .step_by(2)
        .take(take)
        .map(|i| component[i])
        .collect()
}

/// Max `|S|` over `S ⊆ E` with `perm(S) ⊆ E` and `S ∩ perm(S) = ∅`, for one
/// fixed total vertex permutation, with a witnessing certificate.
pub fn orbit_value(
    g: &Graph,
    perm: &[Vertex],
) -> Result<(usize, SimilarityCertificate), OracleError> {
    let decomp = decompose_orbits(g, perm)?;
    let mut s_edges: Vec<Edge> = Vec::new();
    for chain in &decomp.chains {
        s_edges.extend(select_alternating(chain, false));
    }
    for cycle in &decomp.cycles {
        s_edges.extend(select_alternating(cycle, true));
    }
    let image: Vec<Edge> = s_edges
        .iter()
        .map(|&(u, v)| canon(perm[u], perm[v]))
        .collect();
    let mut f = VertexBijection::new();
    for &(u, v) in &s_edges {
        for w in [u, v] {
            if !f.contains_source(w) {
                f.insert(w, perm[w])
                    .expect("restriction of a permutation is injective");
            }
        }
    }
    let value = s_edges.len();
    debug_assert_eq!(
        value,
        decomp.chains.iter().map(|c| chain_value(c.len())).sum::<usize>()
            + decomp.cycles.iter().map(|c| cycle_value(c.len())).sum::<usize>()
    );
    let cert = SimilarityCertificate::new(s_edges, image, f, "oracle-orbit", 0);
    Ok((value, cert))
}

/// Value-only orbit evaluation, used in the hot permutation loop.
fn orbit_value_fast(succ: &[usize], scratch: &mut OrbitScratch) -> usize {
    let m = succ.len();
    scratch.reset(m);
    let has_pred = &mut scratch.has_pred;
    let visited = &mut scratch.visited;
    for &s in succ {
        if s != usize::MAX {
            has_pred[s] = true;
        }
    }
    let mut total = 0;
    for start in 0..m {
        if has_pred[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        loop {
            visited[cur] = true;
            len += 1;
            if succ[cur] == usize::MAX {
                break;
            }
            cur = succ[cur];
        }
        total += chain_value(len);
    }
    for start in 0..m {
        if visited[start] {
            continue;
        }
        let mut len = 0;
        let mut cur = start;
        while !visited[cur] {
            visited[cur] = true;
            len += 1;
            cur = succ[cur];
        }
        total += cycle_value(len);
    }
    total
}

struct OrbitScratch {
    has_pred: Vec<bool>,
    visited: Vec<bool>,
}

impl OrbitScratch {
    fn new() -> Self {
        Self {
            has_pred: Vec::new(),
            visited: Vec::new(),
        }
    }

    fn reset(&mut self, m: usize) {
        self.has_pred.clear();
        self.has_pred.resize(m, false);
        self.visited.clear();
        self.visited.resize(m, false);
    }
}

/// Exact `ISO(g)` with a witnessing certificate, enumerating all `n!` vertex
/// permutations in lexicographic order.
///
/// Refuses when `n > cap` (factorial blowup); the cap is a caller choice,
/// default [`DEFAULT_ORACLE_CAP`].
///
/// ```
/// use selfsim::graph::{verify_certificate, Graph};
/// use selfsim::oracle::{iso_exact, OracleError, DEFAULT_ORACLE_CAP};
///
/// // C5 splits into two edge-disjoint copies of P3 and no better.
/// let g = Graph::cycle(5);
/// let (s, cert) = iso_exact(&g, DEFAULT_ORACLE_CAP).unwrap();
/// assert_eq!(s, 2);
/// assert_eq!(verify_certificate(&g, &cert), Ok(()));
///
/// // Above the cap the oracle refuses rather than grind through n!.
/// let big = Graph::cycle(20);
/// assert!(matches!(
///     iso_exact(&big, DEFAULT_ORACLE_CAP),
///     Err(OracleError::CapExceeded { .. })
/// ));
/// ```
pub fn iso_exact(
    g: &Graph,
    cap: usize,
) -> Result<(usize, SimilarityCertificate), OracleError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(OracleError::CapExceeded { n, cap });
    }
    let m = g.edge_count();
    if m < 2 {
        return Ok((0, SimilarityCertificate::empty("oracle-exact", 0)));
    }
    let upper = m / 2;
    // Dense n x n edge-index table for O(1) image lookup in the hot loop.
    let mut edge_index = vec![usize::MAX; n * n];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        edge_index[u * n + v] = i;
        edge_index[v * n + u] = i;
    }
    let edges = g.edges();

    let mut perm: Vec<Vertex> = (0..n).collect();
    let mut best_value = 0;
    let mut best_perm: Vec<Vertex> = perm.clone();
    let mut succ = vec![0usize; m];
    let mut scratch = OrbitScratch::new();
    loop {
        for (i, &(u, v)) in edges.iter().enumerate() {
            succ[i] = edge_index[perm[u] * n + perm[v]];
        }
        let value = orbit_value_fast(&succ, &mut scratch);
        if value > best_value {
            best_value = value;
            best_perm.copy_from_slice(&perm);
            if best_value == upper {
                break;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (value, cert) = orbit_value(g, &best_perm)?;
    debug_assert_eq!(value, best_value);
    let cert = SimilarityCertificate {
        method: "oracle-exact".to_string(),
        ..cert
    };
    Ok((best_value, cert))
}

/// Advance `perm` to its lexicographic successor; `false` once exhausted.
fn next_permutation(perm: &mut [Vertex]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Exact `ISO(g)` by a completely independent route: enumerate every pair of
/// disjoint equal-size edge subsets and test subgraph isomorphism by brute
/// force over vertex injections. Cross-validates [`iso_exact`].
pub fn iso_exact_naive(g: &Graph) -> Result<usize, OracleError> {
    let m = g.edge_count();
    if m > NAIVE_EDGE_CAP {
        return Err(OracleError::TooManyEdges {
            m,
            cap: NAIVE_EDGE_CAP,
        });
    }
    let edges = g.edges();
    let pick = |mask: u32| -> Vec<Edge> {
        (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| edges[i]).collect()
    };
    for s in (1..=m / 2).rev() {
        for mask1 in 0u32..1 << m {
            if mask1.count_ones() as usize != s {
                continue;
            }
            let rest = !mask1 & ((1u32 << m) - 1);
            let mut mask2 = rest;
            // Enumerate submasks of the complement.
            loop {
                if mask2.count_ones() as usize == s
                    && subgraphs_isomorphic(&pick(mask1), &pick(mask2))
                {
                    return Ok(s);
                }
                if mask2 == 0 {
                    break;
                }
                mask2 = (mask2 - 1) & rest;
            }
        }
    }
    Ok(0)
}

/// Brute-force isomorphism test between two small edge sets, over injections
/// of the covered vertices.
fn subgraphs_isomorphic(e1: &[Edge], e2: &[Edge]) -> bool {
    if e1.len() != e2.len() {
        return false;
    }
    let verts = |es: &[Edge]| -> Vec<Vertex> {
        let mut v: Vec<Vertex> = es.iter().flat_map(|&(a, b)| [a, b]).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let v1 = verts(e1);
    let v2 = verts(e2);
    if v1.len() != v2.len() {
        return false;
    }
    let deg = |es: &[Edge], verts: &[Vertex]| -> Vec<usize> {
        verts
            .iter()
            .map(|&v| es.iter().filter(|&&(a, b)| a == v || b == v).count())
            .collect()
    };
    let d1 = deg(e1, &v1);
    let d2 = deg(e2, &v2);
    let mut s1 = d1.clone();
    let mut s2 = d2.clone();
    s1.sort_unstable();
    s2.sort_unstable();
    if s1 != s2 {
        return false;
    }
    let target: std::collections::HashSet<Edge> = e2.iter().copied().collect();
    let mut assignment = vec![usize::MAX; v1.len()];
    let mut used = vec![false; v2.len()];
    backtrack(0, &v1, &v2, &d1, &d2, e1, &target, &mut assignment, &mut used)
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    i: usize,
    v1: &[Vertex],
    v2: &[Vertex],
    d1: &[usize],
    d2: &[usize],
    e1: &[Edge],
    target: &std::collections::HashSet<Edge>,
    assignment: &mut [usize],
    used: &mut [bool],
) -> bool {
    if i == v1.len() {
        return true;
    }
    for j in 0..v2.len() {
        if used[j] || d1[i] != d2[j] {
            continue;
        }
        // Check edges of e1 whose endpoints are both assigned so far.
        assignment[i] = j;
        let consistent = e1.iter().all(|&(a, b)| {
            let ia = v1.binary_search(&a).unwrap();
            let ib = v1.binary_search(&b).unwrap();
            if ia > i || ib > i {
                return true;
            }
            target.contains(&canon(v2[assignment[ia]], v2[assignment[ib]]))
        });
        if consistent {
            used[j] = true;
            if backtrack(i + 1, v1, v2, d1, d2, e1, target, assignment, used) {
                return true;
            }
            used[j] = false;
        }
        assignment[i] = usize::MAX;
    }
    false
}
