//! Deterministic baseline constructions: the star-forest bound
//! `ISO(G) >= (n-2)/4` and the volume bound `ISO(G) >= m^2/(5 n^2)`, each
//! emitting a verified certificate.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::graph::{
    canon, overlap_count, BipartiteView, Edge, Graph, SimilarityCertificate, Vertex,
    VertexBijection,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("isolated vertex {0}; remove isolated vertices before star_cover")]
    IsolatedVertex(Vertex),
    #[error("paired parts have different sizes ({0} vs {1})")]
    PartSizeMismatch(usize, usize),
    #[error("edge {0:?} does not cross the declared parts")]
    EdgeOutsideParts(Edge),
    #[error("A-side and B-side vertex sets overlap at {0}")]
    PartsOverlap(Vertex),
}

/// A star: a center with `d >= 1` leaves, every (center, leaf) pair an edge
/// of the host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Star {
    pub center: Vertex,
    /// Sorted, distinct, excludes the center.
    pub leaves: Vec<Vertex>,
}

impl Star {
    pub fn new(center: Vertex, mut leaves: Vec<Vertex>) -> Self {
        leaves.sort_unstable();
        leaves.dedup();
        assert!(!leaves.contains(&center), "center cannot be its own leaf");
        assert!(!leaves.is_empty(), "a star has at least one leaf");
        Self { center, leaves }
    }

    pub fn degree(&self) -> usize {
        self.leaves.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.leaves.iter().map(move |&l| canon(self.center, l))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        std::iter::once(self.center).chain(self.leaves.iter().copied())
    }
}

/// A collection of vertex-disjoint stars.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StarForest {
    pub stars: Vec<Star>,
}

impl StarForest {
    pub fn total_edges(&self) -> usize {
        self.stars.iter().map(Star::degree).sum()
    }

    pub fn covered_vertices(&self) -> BTreeSet<Vertex> {
        self.stars.iter().flat_map(Star::vertices).collect()
    }

    /// Panic-free invariant check: stars pairwise vertex-disjoint, every
    /// star edge present in `g`.
    pub fn validate(&self, g: &Graph) -> bool {
        let mut seen = HashSet::new();
        for star in &self.stars {
            for v in star.vertices() {
                if !seen.insert(v) {
                    return false;
                }
            }
            for (u, v) in star.edges() {
                if !g.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }
}

/// Spanning star cover via the deletion process: iteratively remove the
/// lexicographically first edge joining two vertices of degree at least two,
/// until none remains. The surviving graph is a disjoint union of stars
/// whose vertex sets partition `V(g)`.
///
/// Requires `g` isolated-free; run [`Graph::remove_isolated`] first.
///
/// ```
/// use selfsim::bounds::{split_star_forest, star_cover};
/// use selfsim::graph::{verify_certificate, Graph};
///
/// let g = Graph::path(10);
/// let forest = star_cover(&g).unwrap();
/// assert!(forest.validate(&g));
/// let cert = split_star_forest(&forest);
/// assert_eq!(verify_certificate(&g, &cert), Ok(()));
/// // The split always yields s >= (n - 2)/4.
/// assert!(cert.s as f64 >= (10.0 - 2.0) / 4.0);
/// ```
pub fn star_cover(g: &Graph) -> Result<StarForest, BoundsError> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    if let Some(v) = (0..n).find(|&v| deg[v] == 0) {
        return Err(BoundsError::IsolatedVertex(v));
    }
    let mut alive: HashSet<Edge> = g.edge_set();
    // Deletability (both endpoints of degree >= 2) only ever decreases, so a
    // lazily validated ordered worklist visits exactly the edges the paper's
    // process would delete, in lexicographic order.
    let mut worklist: BTreeSet<Edge> = g.edges().iter().copied().collect();
    while let Some(&e) = worklist.iter().next() {
        worklist.remove(&e);
        let (u, v) = e;
        if deg[u] >= 2 && deg[v] >= 2 {
            alive.remove(&e);
            deg[u] -= 1;
            deg[v] -= 1;
        }
    }

    let mut neighbor: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for &(u, v) in &alive {
        neighbor[u].push(v);
        neighbor[v].push(u);
    }
    let mut stars = Vec::new();
    let mut claimed = vec![false; n];
    for v in 0..n {
        if deg[v] >= 2 {
            stars.push(Star::new(v, neighbor[v].clone()));
            claimed[v] = true;
            for &l in &neighbor[v] {
                claimed[l] = true;
            }
        }
    }
    // Remaining alive edges join two degree-1 vertices: 1-stars, centered at
    // the smaller endpoint.
    let mut singles: Vec<Edge> = alive
        .iter()
        .copied()
        .filter(|&(u, v)| !claimed[u] && !claimed[v])
        .collect();
    singles.sort_unstable();
    for (u, v) in singles {
        stars.push(Star::new(u, vec![v]));
    }
    stars.sort_by_key(|s| s.center);
    Ok(StarForest { stars })
}

/// Split a star forest into two edge-disjoint isomorphic halves.
///
/// 1-stars are paired off in ascending center order, one per side; each
/// `d`-star with `d >= 2` contributes `floor(d/2)` edges per side, center
/// mapped to itself and the first leaf half mapped onto the second.
pub fn split_star_forest(forest: &StarForest) -> SimilarityCertificate {
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    let mut f = VertexBijection::new();

    let mut one_stars: Vec<&Star> = forest.stars.iter().filter(|s| s.degree() == 1).collect();
    one_stars.sort_by_key(|s| s.center);
    for pair in one_stars.chunks(2) {
        if let [a, b] = pair {
            e1.push(canon(a.center, a.leaves[0]));
            e2.push(canon(b.center, b.leaves[0]));
            f.insert(a.center, b.center).expect("stars vertex-disjoint");
            f.insert(a.leaves[0], b.leaves[0]).expect("stars vertex-disjoint");
        }
        // An unpaired trailing 1-star contributes nothing.
    }

    for star in forest.stars.iter().filter(|s| s.degree() >= 2) {
        let half = star.degree() / 2;
        let side1 = &star.leaves[..half];
        let side2 = &star.leaves[half..2 * half];
        f.insert(star.center, star.center)
            .expect("stars vertex-disjoint");
        for (&l1, &l2) in side1.iter().zip(side2) {
            e1.push(canon(star.center, l1));
            e2.push(canon(star.center, l2));
            f.insert(l1, l2).expect("leaf halves disjoint");
        }
    }
    SimilarityCertificate::new(e1, e2, f, "star-forest", 0)
}

/// Deterministic local-search bipartition with at least `ceil(m/2)` crossing
/// edges: start from the even/odd split and move any vertex with more
/// same-side than cross-side neighbors until none remains.
pub fn bipartition_halver(g: &Graph) -> BipartiteView {
    let n = g.vertex_count();
    let mut side: Vec<bool> = (0..n).map(|v| v % 2 == 1).collect();
    loop {
        let mut moved = false;
        for v in 0..n {
            let same = g
                .neighbors(v)
                .iter()
                .filter(|&&w| side[w] == side[v])
                .count();
            let cross = g.degree(v) - same;
            if same > cross {
                side[v] = !side[v];
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    let part_a: Vec<Vertex> = (0..n).filter(|&v| !side[v]).collect();
    let part_b: Vec<Vertex> = (0..n).filter(|&v| side[v]).collect();
    let bv = BipartiteView::new(g, &part_a, &part_b);
    debug_assert!(bv.edges().len() * 2 >= g.edge_count());
    bv
}

/// Disjoint halves of the crossing edges, round-robin over the sorted edge
/// list; sizes `floor(m/2)` and `ceil(m/2)`.
pub fn edge_halves(bv: &BipartiteView) -> (Vec<Edge>, Vec<Edge>) {
    let mut g1 = Vec::new();
    let mut g2 = Vec::new();
    for (i, &e) in bv.edges().iter().enumerate() {
        if i % 2 == 1 {
            g1.push(e);
        } else {
            g2.push(e);
        }
    }
    (g1, g2)
}

/// How [`similarity_by_expectation`] resolves the random bijection choices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectationMode {
    /// Method of conditional expectations: deterministic, and the returned
    /// overlap is guaranteed to be at least `|g1||g2|/(|A||B|)`.
    Derandomized,
    /// Sample `restarts` uniformly random bijection pairs and keep the best.
    /// No deterministic guarantee; intended for inputs where the exact
    /// conditional-expectation sweep is too expensive.
    RandomRestarts { restarts: usize, seed: u64 },
}

struct Indexed {
    verts: Vec<Vertex>,
}

impl Indexed {
    fn new(verts: &[Vertex]) -> Self {
        let mut verts = verts.to_vec();
        verts.sort_unstable();
        Self { verts }
    }

    fn len(&self) -> usize {
        self.verts.len()
    }

    fn index_of(&self, v: Vertex) -> Option<usize> {
        self.verts.binary_search(&v).ok()
    }
}

/// Orient the edges of `edges` as (A-index, B-index) pairs.
fn orient(
    edges: &[Edge],
    a: &Indexed,
    b: &Indexed,
) -> Result<Vec<(usize, usize)>, BoundsError> {
    edges
        .iter()
        .map(|&e| {
            let (u, v) = e;
            match (a.index_of(u), b.index_of(v)) {
                (Some(ia), Some(ib)) => Ok((ia, ib)),
                _ => match (a.index_of(v), b.index_of(u)) {
                    (Some(ia), Some(ib)) => Ok((ia, ib)),
                    _ => Err(BoundsError::EdgeOutsideParts(e)),
                },
            }
        })
        .collect()
}

/// A bijection between two bipartite edge sets with overlap at least
/// `|g1|·|g2|/(|A1|·|B1|)`, found by the method of conditional expectations.
///
/// The bijection combines `A1 -> A2` with `B1 -> B2`. Sources are fixed one
/// at a time (all of A1 in ascending order, then all of B1), each to the
/// image maximizing the exact conditional expected overlap under uniformly
/// random completion, ties broken by lowest image id.
pub fn similarity_by_expectation(
    g1: &[Edge],
    g2: &[Edge],
    part_a1: &[Vertex],
    part_a2: &[Vertex],
    part_b1: &[Vertex],
    part_b2: &[Vertex],
    mode: ExpectationMode,
) -> Result<(VertexBijection, usize), BoundsError> {
    let a1 = Indexed::new(part_a1);
    let a2 = Indexed::new(part_a2);
    let b1 = Indexed::new(part_b1);
    let b2 = Indexed::new(part_b2);
    if a1.len() != a2.len() {
        return Err(BoundsError::PartSizeMismatch(a1.len(), a2.len()));
    }
    if b1.len() != b2.len() {
        return Err(BoundsError::PartSizeMismatch(b1.len(), b2.len()));
    }
    for side_a in [&a1, &a2] {
        for side_b in [&b1, &b2] {
            for &v in &side_a.verts {
                if side_b.index_of(v).is_some() {
                    return Err(BoundsError::PartsOverlap(v));
                }
            }
        }
    }
    let oriented1 = orient(g1, &a1, &b1)?;
    let oriented2 = orient(g2, &a2, &b2)?;

    let f = match mode {
        ExpectationMode::Derandomized => {
            // Tiny parts are solved exactly: the optimum over all bijections
            // dominates the expectation bound, and a conditional-expectation
            // sweep does not always reach it (a greedy prefix can lock in a
            // suboptimal A-phase).
            if a1.len() <= 4 && b1.len() <= 4 {
                exhaustive_bijection(&oriented1, &oriented2, &a1, &a2, &b1, &b2)
            } else {
                derandomized_bijection(&oriented1, &oriented2, &a1, &a2, &b1, &b2)
            }
        }
        ExpectationMode::RandomRestarts { restarts, seed } => {
            let mut best: Option<(usize, VertexBijection)> = None;
            for r in 0..restarts.max(1) {
                let mut rng = ChaCha12Rng::seed_from_u64(crate::prng::derive_stream(seed, r as u64));
                let mut imgs_a: Vec<usize> = (0..a2.len()).collect();
                let mut imgs_b: Vec<usize> = (0..b2.len()).collect();
                imgs_a.shuffle(&mut rng);
                imgs_b.shuffle(&mut rng);
                let mut f = VertexBijection::new();
                for (i, &j) in imgs_a.iter().enumerate() {
                    f.insert(a1.verts[i], a2.verts[j]).expect("shuffle is injective");
                }
                for (i, &j) in imgs_b.iter().enumerate() {
                    f.insert(b1.verts[i], b2.verts[j]).expect("shuffle is injective");
                }
                let overlap = overlap_count(&f, g1, g2).expect("f total on V(g1)");
                if best.as_ref().map_or(true, |(b, _)| overlap > *b) {
                    best = Some((overlap, f));
                }
            }
            best.expect("at least one restart").1
        }
    };

    let overlap = overlap_count(&f, g1, g2).expect("f total on V(g1)");
    Ok((f, overlap))
}

/// Exact optimum over all (A, B) bijection pairs; only called for part
/// sizes <= 4 (at most 24 * 24 candidates). First maximum in lexicographic
/// permutation order wins, keeping the result deterministic.
fn exhaustive_bijection(
    e1: &[(usize, usize)],
    e2: &[(usize, usize)],
    a1: &Indexed,
    a2: &Indexed,
    b1: &Indexed,
    b2: &Indexed,
) -> VertexBijection {
    fn perms(k: usize) -> Vec<Vec<usize>> {
        let mut cur: Vec<usize> = (0..k).collect();
        let mut out = vec![cur.clone()];
        while next_lex(&mut cur) {
            out.push(cur.clone());
        }
        out
    }
    fn next_lex(p: &mut [usize]) -> bool {
        let n = p.len();
        if n < 2 {
            return false;
        }
        let mut i = n - 1;
        while i > 0 && p[i - 1] >= p[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = n - 1;
        while p[j] <= p[i - 1] {
            j -= 1;
        }
        p.swap(i - 1, j);
        p[i..].reverse();
        true
    }

    let e2_set: HashSet<(usize, usize)> = e2.iter().copied().collect();
    let pa = perms(a1.len());
    let pb = perms(b1.len());
    let mut best: Option<(usize, &Vec<usize>, &Vec<usize>)> = None;
    for fa in &pa {
        for fb in &pb {
            let overlap = e1
                .iter()
                .filter(|&&(x, y)| e2_set.contains(&(fa[x], fb[y])))
                .count();
            if best.map_or(true, |(b, _, _)| overlap > b) {
                best = Some((overlap, fa, fb));
            }
        }
    }
    let (_, fa, fb) = best.expect("permutation lists are nonempty");
    let mut f = VertexBijection::new();
    for (x, &y) in fa.iter().enumerate() {
        f.insert(a1.verts[x], a2.verts[y]).expect("permutation is injective");
    }
    for (x, &y) in fb.iter().enumerate() {
        f.insert(b1.verts[x], b2.verts[y]).expect("permutation is injective");
    }
    f
}

/// The conditional-expectation sweep over local indices.
fn derandomized_bijection(
    e1: &[(usize, usize)],
    e2: &[(usize, usize)],
    a1: &Indexed,
    a2: &Indexed,
    b1: &Indexed,
    b2: &Indexed,
) -> VertexBijection {
    let (na, nb) = (a1.len(), b1.len());
    let deg1a = degree_counts(e1, na, true);
    let deg2a = degree_counts(e2, na, true);

    // Phase 1: fix A1 -> A2. With every B-source still random, the exact
    // conditional expectation reduces to a closed form in the degree sums:
    // fixing x -> y changes it by deg2(y) * (deg1(x) - R/r') up to constants,
    // where R sums the degrees of the still-unfixed A1 sources and r' counts
    // them after x is fixed.
    let mut fa = vec![usize::MAX; na];
    let mut used_a = vec![false; na];
    let mut remaining_deg: i64 = deg1a.iter().map(|&d| d as i64).sum();
    for x in 0..na {
        remaining_deg -= deg1a[x] as i64;
        let r_after = (na - x - 1) as f64;
        let factor = if r_after > 0.0 {
            deg1a[x] as f64 - remaining_deg as f64 / r_after
        } else {
            deg1a[x] as f64
        };
        let mut best = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for y in 0..na {
            if used_a[y] {
                continue;
            }
            let gain = deg2a[y] as f64 * factor;
            if gain > best_gain {
                best_gain = gain;
                best = y;
            }
        }
        fa[x] = best;
        used_a[best] = true;
    }

    // Phase 2: fix B1 -> B2 against the now-fixed A map. For the current
    // source x, W[y] counts the g1 edges at x whose A-image's g2 neighborhood
    // contains y; U[y] aggregates W over all still-unfixed sources.
    let adj_b1: Vec<Vec<usize>> = adjacency(e1, nb, false);
    let adj_a2: Vec<Vec<usize>> = adjacency(e2, na, true);
    let nb2 = b2.len();
    let mut cnt_unfixed: Vec<i64> = deg1a.iter().map(|&d| d as i64).collect();
    // cnt_unfixed is per A1 source: its number of unfixed B1 neighbors.
    let mut u_col = vec![0i64; nb2];
    for x_a in 0..na {
        for &y in &adj_a2[fa[x_a]] {
            u_col[y] += cnt_unfixed[x_a];
        }
    }
    let mut fb = vec![usize::MAX; nb];
    let mut used_b = vec![false; nb2];
    let mut w_col = vec![0i64; nb2];
    let mut touched: Vec<usize> = Vec::new();
    for x in 0..nb {
        // W for this source.
        for &a_src in &adj_b1[x] {
            for &y in &adj_a2[fa[a_src]] {
                if w_col[y] == 0 {
                    touched.push(y);
                }
                w_col[y] += 1;
            }
        }
        let r_after = (nb - x - 1) as f64;
        let mut best = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for y in 0..nb2 {
            if used_b[y] {
                continue;
            }
            let w = w_col[y] as f64;
            let gain = if r_after > 0.0 {
                w - (u_col[y] as f64 - w) / r_after
            } else {
                w
            };
            if gain > best_gain {
                best_gain = gain;
                best = y;
            }
        }
        fb[x] = best;
        used_b[best] = true;
        // Retire x from the U aggregate and clear W.
        for &a_src in &adj_b1[x] {
            cnt_unfixed[a_src] -= 1;
            for &y in &adj_a2[fa[a_src]] {
                u_col[y] -= 1;
            }
        }
        for &y in &touched {
            w_col[y] = 0;
        }
        touched.clear();
    }

    let mut f = VertexBijection::new();
    for x in 0..na {
        f.insert(a1.verts[x], a2.verts[fa[x]]).expect("fa injective");
    }
    for x in 0..nb {
        f.insert(b1.verts[x], b2.verts[fb[x]]).expect("fb injective");
    }
    f
}

fn degree_counts(edges: &[(usize, usize)], n: usize, a_side: bool) -> Vec<usize> {
    let mut deg = vec![0; n];
    for &(a, b) in edges {
        deg[if a_side { a } else { b }] += 1;
    }
    deg
}

/// Adjacency lists keyed by one side of oriented (a, b) pairs.
fn adjacency(edges: &[(usize, usize)], n_key: usize, key_is_a: bool) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n_key];
    for &(a, b) in edges {
        if key_is_a {
            adj[a].push(b);
        } else {
            adj[b].push(a);
        }
    }
    adj
}

/// Result of [`iso_volume`]: the certificate plus whether the
/// `m^2/(5 n^2)` guarantee applies (it needs `m >= 20`).
#[derive(Debug, Clone)]
pub struct VolumeResult {
    pub cert: SimilarityCertificate,
    pub guaranteed: bool,
}

/// The volume bound `ISO(G) >= m^2/(5 n^2)`: bipartition with at least half
/// the edges crossing, split the crossing edges in two, and derandomize the
/// random-bijection expectation argument between the halves.
///
/// ```
/// use selfsim::bounds::{iso_volume, ExpectationMode};
/// use selfsim::graph::{verify_certificate, Graph};
///
/// // K10: m = 45, n = 10, so s >= 45^2/500 = 4.05, hence s >= 5.
/// let g = Graph::complete(10);
/// let res = iso_volume(&g, ExpectationMode::Derandomized);
/// assert!(res.guaranteed);
/// assert!(res.cert.s >= 5);
/// assert_eq!(verify_certificate(&g, &res.cert), Ok(()));
/// ```
pub fn iso_volume(g: &Graph, mode: ExpectationMode) -> VolumeResult {
    let m = g.edge_count();
    let guaranteed = m >= 20;
    if m < 2 {
        return VolumeResult {
            cert: SimilarityCertificate::empty("volume", 0),
            guaranteed,
        };
    }
    let bv = bipartition_halver(g);
    let (g1, g2) = edge_halves(&bv);
    if g1.is_empty() || g2.is_empty() || bv.part_a().is_empty() || bv.part_b().is_empty() {
        return VolumeResult {
            cert: SimilarityCertificate::empty("volume", 0),
            guaranteed,
        };
    }
    let (f, _overlap) = similarity_by_expectation(
        &g1,
        &g2,
        bv.part_a(),
        bv.part_a(),
        bv.part_b(),
        bv.part_b(),
        mode,
    )
    .expect("halves of one bipartition satisfy the preconditions");
    let cert = certificate_from_bijection(&f, &g1, &g2, "volume", match mode {
        ExpectationMode::Derandomized => 0,
        ExpectationMode::RandomRestarts { seed, .. } => seed,
    });
    if guaranteed {
        let (mf, nf) = (m as f64, g.vertex_count() as f64);
        debug_assert!(cert.s as f64 >= mf * mf / (5.0 * nf * nf));
    }
    VolumeResult { cert, guaranteed }
}

/// Assemble a certificate from a bijection: keep exactly the `g1` edges whose
/// image lands in `g2`.
pub fn certificate_from_bijection(
    f: &VertexBijection,
    g1: &[Edge],
    g2: &[Edge],
    method: &str,
    seed: u64,
) -> SimilarityCertificate {
    let target: HashSet<Edge> = g2.iter().copied().collect();
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    let mut used_images = HashSet::new();
    for &e in g1 {
        if let Some(img) = f.map_edge(e) {
            if target.contains(&img) && used_images.insert(img) {
                e1.push(e);
                e2.push(img);
            }
        }
    }
    // Restrict f to the endpoints of e1 so the certificate stands alone.
    let mut restricted = VertexBijection::new();
    for &(u, v) in &e1 {
        for w in [u, v] {
            if !restricted.contains_source(w) {
                restricted
                    .insert(w, f.get(w).expect("image existed above"))
                    .expect("restriction of an injection");
            }
        }
    }
    SimilarityCertificate::new(e1, e2, restricted, method, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::verify_certificate;

    #[test]
    fn star_cover_p3_is_single_star() {
        let forest = star_cover(&Graph::path(3)).unwrap();
        assert_eq!(forest.stars, vec![Star::new(1, vec![0, 2])]);
    }

    #[test]
    fn star_cover_k3_deletes_first_edge() {
        // (0,1) is the lexicographically first deletable edge; the remainder
        // is the 2-star centered at 2.
        let forest = star_cover(&Graph::complete(3)).unwrap();
        assert_eq!(forest.stars, vec![Star::new(2, vec![0, 1])]);
    }

    #[test]
    fn star_cover_matching_untouched() {
        let g = Graph::build(8, &[(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap();
        let forest = star_cover(&g).unwrap();
        assert_eq!(forest.stars.len(), 4);
        assert!(forest.stars.iter().all(|s| s.degree() == 1));
    }

    #[test]
    fn star_cover_rejects_isolated() {
        let g = Graph::build(3, &[(0, 1)]).unwrap();
        assert_eq!(star_cover(&g), Err(BoundsError::IsolatedVertex(2)));
    }

    #[test]
    fn star_cover_partitions_vertices() {
        let g = Graph::complete(6);
        let forest = star_cover(&g).unwrap();
        assert!(forest.validate(&g));
        assert_eq!(forest.covered_vertices().len(), 6);
    }

    #[test]
    fn split_two_one_stars() {
        let forest = StarForest {
            stars: vec![Star::new(0, vec![1]), Star::new(2, vec![3])],
        };
        let cert = split_star_forest(&forest);
        assert_eq!(cert.s, 1);
    }

    #[test]
    fn split_five_star() {
        let forest = StarForest {
            stars: vec![Star::new(0, vec![1, 2, 3, 4, 5])],
        };
        let cert = split_star_forest(&forest);
        assert_eq!(cert.s, 2);
        let g = Graph::build(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        assert_eq!(verify_certificate(&g, &cert), Ok(()));
    }

    #[test]
    fn split_lone_one_star() {
        let forest = StarForest {
            stars: vec![Star::new(0, vec![1])],
        };
        assert_eq!(split_star_forest(&forest).s, 0);
    }

    #[test]
    fn split_meets_quarter_bound() {
        for g in [Graph::complete(7), Graph::cycle(9), Graph::path(8)] {
            let forest = star_cover(&g).unwrap();
            let cert = split_star_forest(&forest);
            let covered = forest.covered_vertices().len();
            assert!(cert.s * 4 + 2 >= covered, "s = {}, covered = {covered}", cert.s);
            assert_eq!(verify_certificate(&g, &cert), Ok(()));
        }
    }

    #[test]
    fn halver_single_edge() {
        let bv = bipartition_halver(&Graph::build(2, &[(0, 1)]).unwrap());
        assert_eq!(bv.edges().len(), 1);
    }

    #[test]
    fn halver_star_gets_full_cut() {
        let g = Graph::build(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let bv = bipartition_halver(&g);
        assert_eq!(bv.edges().len(), 3);
    }

    #[test]
    fn halver_c4_finds_proper_coloring() {
        let bv = bipartition_halver(&Graph::cycle(4));
        assert_eq!(bv.edges().len(), 4);
    }

    #[test]
    fn halves_sizes() {
        let g = Graph::complete(4);
        let bv = bipartition_halver(&g);
        let (g1, g2) = edge_halves(&bv);
        let m = bv.edges().len();
        assert_eq!(g1.len(), m / 2);
        assert_eq!(g2.len(), m - m / 2);
        assert!(g1.iter().all(|e| !g2.contains(e)));
    }

    #[test]
    fn expectation_complete_bipartite_is_full() {
        // g1 = g2 = complete bipartite on the same parts: every bijection
        // realizes the full |A|*|B| overlap.
        let g = Graph::build(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap();
        let edges: Vec<Edge> = g.edges().to_vec();
        let (_, overlap) = similarity_by_expectation(
            &edges,
            &edges,
            &[0, 1],
            &[0, 1],
            &[2, 3, 4],
            &[2, 3, 4],
            ExpectationMode::Derandomized,
        )
        .unwrap();
        assert_eq!(overlap, 6);
    }

    #[test]
    fn expectation_forced_singleton() {
        let (f, overlap) = similarity_by_expectation(
            &[(0, 1)],
            &[(2, 3)],
            &[0],
            &[2],
            &[1],
            &[3],
            ExpectationMode::Derandomized,
        )
        .unwrap();
        assert_eq!(overlap, 1);
        assert_eq!(f.get(0), Some(2));
        assert_eq!(f.get(1), Some(3));
    }

    #[test]
    fn expectation_beats_product_bound_and_brute_force_agrees() {
        // Three edges a side between 3+3 vertices; brute force over all
        // 36 bijection pairs gives the optimum, derandomization must reach
        // at least the product bound 9/9 = 1.
        let g1 = [(0, 3), (1, 4), (2, 5)];
        let g2 = [(6, 9), (6, 10), (7, 9)];
        let a1 = [0, 1, 2];
        let b1 = [3, 4, 5];
        let a2 = [6, 7, 8];
        let b2 = [9, 10, 11];
        let (_, overlap) = similarity_by_expectation(
            &g1,
            &g2,
            &a1,
            &a2,
            &b1,
            &b2,
            ExpectationMode::Derandomized,
        )
        .unwrap();
        assert!(overlap >= 1);
        let best = brute_force_optimum(&g1, &g2, &a1, &a2, &b1, &b2);
        assert!(overlap <= best);
        assert_eq!(overlap, best);
    }

    #[test]
    fn expectation_rejects_size_mismatch() {
        let err = similarity_by_expectation(
            &[],
            &[],
            &[0, 1],
            &[2],
            &[3],
            &[4],
            ExpectationMode::Derandomized,
        )
        .unwrap_err();
        assert_eq!(err, BoundsError::PartSizeMismatch(2, 1));
    }

    pub(super) fn brute_force_optimum(
        g1: &[Edge],
        g2: &[Edge],
        a1: &[Vertex],
        a2: &[Vertex],
        b1: &[Vertex],
        b2: &[Vertex],
    ) -> usize {
        fn permutations(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for rest in permutations(k - 1) {
                for pos in 0..=rest.len() {
                    let mut p = rest.clone();
                    p.insert(pos, k - 1);
                    out.push(p);
                }
            }
            out
        }
        let mut best = 0;
        for pa in permutations(a1.len()) {
            for pb in permutations(b1.len()) {
                let mut f = VertexBijection::new();
                for (i, &j) in pa.iter().enumerate() {
                    f.insert(a1[i], a2[j]).unwrap();
                }
                for (i, &j) in pb.iter().enumerate() {
                    f.insert(b1[i], b2[j]).unwrap();
                }
                best = best.max(overlap_count(&f, g1, g2).unwrap());
            }
        }
        best
    }

    #[test]
    fn volume_k10_reaches_bound() {
        let g = Graph::complete(10);
        let res = iso_volume(&g, ExpectationMode::Derandomized);
        assert!(res.guaranteed);
        assert!(res.cert.s as f64 >= 45.0 * 45.0 / 500.0);
        assert_eq!(verify_certificate(&g, &res.cert), Ok(()));
        assert!(2 * res.cert.s <= g.edge_count());
    }

    #[test]
    fn volume_below_twenty_edges_unguaranteed() {
        let g = Graph::cycle(19); // m = 19
        let res = iso_volume(&g, ExpectationMode::Derandomized);
        assert!(!res.guaranteed);
        assert_eq!(verify_certificate(&g, &res.cert), Ok(()));
    }

    #[test]
    fn volume_empty_graph() {
        let g = Graph::build(5, &[]).unwrap();
        let res = iso_volume(&g, ExpectationMode::Derandomized);
        assert_eq!(res.cert.s, 0);
    }
}
