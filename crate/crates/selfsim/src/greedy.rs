//! Greedy bijection extension over star forests.
//!
//! The mechanism: seed a random bijection on the B side, then extend it over
//! the A side one vertex at a time, always mapping onto the star center whose
//! leaf set best overlaps the image of the current vertex's neighborhood.
//! Rare large overlaps are exactly what the greedy pass harvests, and they
//! are worth a logarithmic factor over a uniformly random bijection.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::bounds::{iso_volume, ExpectationMode, Star, StarForest};
use crate::graph::{
    overlap_count, BipartiteView, Graph, SimilarityCertificate, Vertex, VertexBijection,
};
use crate::prng;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GreedyError {
    #[error("paired parts have different sizes ({0} vs {1})")]
    PartSizeMismatch(usize, usize),
    #[error("base bijection is not total on B1: {0} unmapped")]
    BijectionNotTotal(Vertex),
    #[error("star forests must be d-regular with equal star counts")]
    IrregularForest,
    #[error("invalid config: {0}")]
    InvalidConfig(&'static str),
}

/// Whether a greedy step demands a fixed per-step gain or simply takes the
/// best candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    /// Map a vertex only when the best candidate overlaps in at least `t`
    /// leaves, and stop after the theory-mandated quarter of the centers.
    /// Exists for conformance tests; the thresholds are asymptotic and tiny
    /// at desk scale.
    Fixed(usize),
    /// Always map to the best available candidate and exhaust all centers.
    AdaptiveBest,
}

#[derive(Debug, Clone, Copy)]
pub struct GreedyConfig {
    /// Tail-exponent parameter, in (0, 1/2).
    pub alpha: f64,
    /// Per-star fresh-leaf requirement; `None` derives `max(1, avg_deg/16)`
    /// from the relevant bipartite view.
    pub leaf_quota: Option<usize>,
    pub threshold_mode: ThresholdMode,
    /// Number of B-side random bijections tried; the best outcome is kept.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0 / 25.0,
            leaf_quota: None,
            threshold_mode: ThresholdMode::AdaptiveBest,
            restarts: 1,
            seed: 0,
        }
    }
}

impl GreedyConfig {
    pub fn validate(&self) -> Result<(), GreedyError> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(GreedyError::InvalidConfig("alpha must lie in (0, 1/2)"));
        }
        if self.leaf_quota == Some(0) {
            return Err(GreedyError::InvalidConfig("leaf_quota must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(GreedyError::InvalidConfig("restarts must be at least 1"));
        }
        Ok(())
    }
}

/// Among candidate stars whose center is unused, the one whose leaf set
/// best overlaps `image_set`; ties break toward the lowest center id.
/// `None` only when every center is used.
pub fn best_hit(
    image_set: &HashSet<Vertex>,
    candidates: &StarForest,
    used: &HashSet<Vertex>,
) -> Option<(Vertex, usize)> {
    let mut best: Option<(Vertex, usize)> = None;
    let mut stars: Vec<&Star> = candidates.stars.iter().collect();
    stars.sort_by_key(|s| s.center);
    for star in stars {
        if used.contains(&star.center) {
            continue;
        }
        let overlap = star
            .leaves
            .iter()
            .filter(|l| image_set.contains(l))
            .count();
        if best.map_or(true, |(_, b)| overlap > b) {
            best = Some((star.center, overlap));
        }
    }
    best
}

/// Greedy maximal star forest: scan `centers_from` in ascending id, make a
/// vertex a center when at least `leaf_quota` of its other-side neighbors are
/// unclaimed, claiming exactly `leaf_quota` of them (lowest ids first); stop
/// at `max_stars`.
pub fn max_star_forest(
    bv: &BipartiteView,
    centers_from: &[Vertex],
    leaf_quota: usize,
    max_stars: usize,
) -> StarForest {
    assert!(leaf_quota >= 1);
    let mut centers: Vec<Vertex> = centers_from.to_vec();
    centers.sort_unstable();
    centers.dedup();
    let mut used: HashSet<Vertex> = HashSet::new();
    let mut stars = Vec::new();
    for &v in &centers {
        if stars.len() >= max_stars {
            break;
        }
        if used.contains(&v) {
            continue;
        }
        let neighbors = if bv.contains_a(v) {
            bv.neighbors_of_a(v)
        } else {
            bv.neighbors_of_b(v)
        };
        let fresh: Vec<Vertex> = neighbors
            .iter()
            .copied()
            .filter(|w| !used.contains(w))
            .take(leaf_quota)
            .collect();
        if fresh.len() < leaf_quota {
            continue;
        }
        used.insert(v);
        used.extend(fresh.iter().copied());
        stars.push(Star::new(v, fresh));
    }
    StarForest { stars }
}

fn random_bijection(
    from: &[Vertex],
    to: &[Vertex],
    seed: u64,
    stream: u64,
) -> VertexBijection {
    let mut rng = prng::rng_for(seed, stream);
    let mut images = to.to_vec();
    images.shuffle(&mut rng);
    let mut f = VertexBijection::new();
    for (&s, &t) in from.iter().zip(&images) {
        f.insert(s, t).expect("shuffle of distinct targets is injective");
    }
    f
}

/// One greedy pass extending a fixed B-side bijection over the A side.
fn greedy_pass(
    g1: &BipartiteView,
    g2: &BipartiteView,
    f_b: &VertexBijection,
    forest: &StarForest,
    mode: ThresholdMode,
) -> VertexBijection {
    let mut f = f_b.clone();
    let mut used: HashSet<Vertex> = HashSet::new();
    for &x1 in g1.part_a() {
        let image: HashSet<Vertex> = g1
            .neighbors_of_a(x1)
            .iter()
            .map(|&b| f_b.get(b).expect("f_b total on B1"))
            .collect();
        if let Some((center, overlap)) = best_hit(&image, forest, &used) {
            let accept = match mode {
                ThresholdMode::Fixed(t) => overlap >= t,
                ThresholdMode::AdaptiveBest => true,
            };
            if accept {
                f.insert(x1, center).expect("centers distinct, x1 fresh");
                used.insert(center);
            }
        }
    }
    // Complete over the unmapped vertices, ascending ids on both sides.
    let remaining: Vec<Vertex> = g2
        .part_a()
        .iter()
        .copied()
        .filter(|y| !f.contains_target(*y))
        .collect();
    let unmapped: Vec<Vertex> = g1
        .part_a()
        .iter()
        .copied()
        .filter(|x| !f.contains_source(*x))
        .collect();
    for (&x, &y) in unmapped.iter().zip(&remaining) {
        f.insert(x, y).expect("fresh source, fresh target");
    }
    f
}

/// Greedy similarity between two bipartite views: a random `B1 -> B2`
/// bijection extended greedily over `A1` against a star forest grown on the
/// `A2` side, best outcome over `cfg.restarts` B-side seeds.
pub fn greedy_bipartite_similarity(
    g1: &BipartiteView,
    g2: &BipartiteView,
    cfg: &GreedyConfig,
) -> Result<(VertexBijection, usize), GreedyError> {
    cfg.validate()?;
    if g1.part_a().len() != g2.part_a().len() {
        return Err(GreedyError::PartSizeMismatch(
            g1.part_a().len(),
            g2.part_a().len(),
        ));
    }
    if g1.part_b().len() != g2.part_b().len() {
        return Err(GreedyError::PartSizeMismatch(
            g1.part_b().len(),
            g2.part_b().len(),
        ));
    }
    let quota = cfg
        .leaf_quota
        .unwrap_or_else(|| ((g2.average_degree_a() / 16.0) as usize).max(1));
    let forest = max_star_forest(g2, g2.part_a(), quota, g2.part_a().len());
    let mut best: Option<(usize, VertexBijection)> = None;
    for r in 0..cfg.restarts {
        let f_b = random_bijection(g1.part_b(), g2.part_b(), cfg.seed, r as u64);
        let f = greedy_pass(g1, g2, &f_b, &forest, cfg.threshold_mode);
        let count = overlap_count(&f, g1.edges(), g2.edges()).expect("f total on V(g1)");
        if best.as_ref().map_or(true, |(b, _)| count > *b) {
            best = Some((count, f));
        }
    }
    let (count, f) = best.expect("restarts >= 1");
    Ok((f, count))
}

/// Extend a total `B1 -> B2` bijection over the centers of two d-regular
/// star forests of equal star count.
///
/// A target center is available while at least half its leaves are still
/// outside the already-used image leaves; each source center maps to the
/// available target with the largest neighborhood overlap under the map.
/// Fixed mode stops after `ceil(k/4)` mapped centers and requires each step
/// to gain at least the threshold; adaptive mode exhausts every center.
pub fn forest_pair_similarity(
    s1: &StarForest,
    s2: &StarForest,
    f_b: &VertexBijection,
    cfg: &GreedyConfig,
) -> Result<(VertexBijection, usize), GreedyError> {
    cfg.validate()?;
    let k = s1.stars.len();
    if s2.stars.len() != k {
        return Err(GreedyError::IrregularForest);
    }
    let degree = s1.stars.first().map_or(0, Star::degree);
    if s1
        .stars
        .iter()
        .chain(&s2.stars)
        .any(|s| s.degree() != degree)
    {
        return Err(GreedyError::IrregularForest);
    }
    for star in &s1.stars {
        for &leaf in &star.leaves {
            if !f_b.contains_source(leaf) {
                return Err(GreedyError::BijectionNotTotal(leaf));
            }
        }
    }

    let limit = match cfg.threshold_mode {
        ThresholdMode::Fixed(_) => k.div_ceil(4),
        ThresholdMode::AdaptiveBest => k,
    };
    let mut f = f_b.clone();
    let mut used_image_leaves: HashSet<Vertex> = HashSet::new();
    let mut used_centers: HashSet<Vertex> = HashSet::new();
    let mut mapped = 0usize;
    let mut gain_total = 0usize;

    let mut sources: Vec<&Star> = s1.stars.iter().collect();
    sources.sort_by_key(|s| s.center);
    let mut targets: Vec<&Star> = s2.stars.iter().collect();
    targets.sort_by_key(|s| s.center);

    for src in sources {
        if mapped >= limit {
            break;
        }
        let image: HashSet<Vertex> = src
            .leaves
            .iter()
            .map(|&l| f_b.get(l).expect("totality checked"))
            .collect();
        let mut best: Option<(Vertex, usize)> = None;
        for tgt in &targets {
            if used_centers.contains(&tgt.center) {
                continue;
            }
            let fresh = tgt
                .leaves
                .iter()
                .filter(|l| !used_image_leaves.contains(l))
                .count();
            // Availability: at least d/2 leaves untouched.
            if 2 * fresh < degree {
                continue;
            }
            let overlap = tgt
                .leaves
                .iter()
                .filter(|l| image.contains(l))
                .count();
            if best.map_or(true, |(_, b)| overlap > b) {
                best = Some((tgt.center, overlap));
            }
        }
        let Some((center, overlap)) = best else {
            continue;
        };
        if let ThresholdMode::Fixed(t) = cfg.threshold_mode {
            if overlap < t {
                continue;
            }
        }
        f.insert(src.center, center)
            .expect("fresh source center, fresh target center");
        used_centers.insert(center);
        used_image_leaves.extend(image.iter().copied());
        mapped += 1;
        gain_total += overlap;
        // Unavailability bookkeeping: each unavailable center pins at least
        // d/2 used image leaves, all its own, so there are at most 2*mapped.
        debug_assert!(
            targets
                .iter()
                .filter(|t| {
                    !used_centers.contains(&t.center)
                        && 2 * t
                            .leaves
                            .iter()
                            .filter(|l| !used_image_leaves.contains(l))
                            .count()
                            < degree
                })
                .count()
                <= 2 * mapped
        );
    }
    Ok((f, gain_total))
}

/// The star-forest collections grown on one side, plus the residual sets the
/// dense fallback operates on.
#[derive(Debug, Clone, Default)]
pub struct ForestCollection {
    pub forests: Vec<StarForest>,
    /// High-degree vertices left uncovered when collection stalls.
    pub residual_high_degree: Vec<Vertex>,
    /// Leaf union of the final partial forest at the stall.
    pub residual_leafset: Vec<Vertex>,
}

/// Grow disjoint-center star forests until the next one cannot be completed.
///
/// `forest_size` of `None` means adaptive: accept any nonempty forest and
/// keep growing until nothing fits. `Some(k)` is the theory-conformance
/// shape: every forest must have exactly `k` stars.
fn collect_forests(
    bv: &BipartiteView,
    quota: usize,
    forest_size: Option<usize>,
    degree_floor: f64,
) -> ForestCollection {
    let mut used_centers: HashSet<Vertex> = HashSet::new();
    let mut forests = Vec::new();
    let mut residual_leafset = Vec::new();
    loop {
        let available: Vec<Vertex> = bv
            .part_a()
            .iter()
            .copied()
            .filter(|v| !used_centers.contains(v))
            .collect();
        if available.is_empty() {
            break;
        }
        let cap = forest_size.unwrap_or(available.len());
        let forest = max_star_forest(bv, &available, quota, cap);
        let complete = match forest_size {
            Some(k) => forest.stars.len() == k,
            None => !forest.stars.is_empty(),
        };
        if !complete {
            let mut leaves: HashSet<Vertex> =
                forest.stars.iter().flat_map(|s| s.leaves.iter().copied()).collect();
            residual_leafset = leaves.drain().collect();
            residual_leafset.sort_unstable();
            break;
        }
        used_centers.extend(forest.stars.iter().map(|s| s.center));
        forests.push(forest);
    }
    let residual_high_degree: Vec<Vertex> = bv
        .part_a()
        .iter()
        .copied()
        .filter(|&v| {
            !used_centers.contains(&v) && bv.neighbors_of_a(v).len() as f64 >= degree_floor
        })
        .collect();
    ForestCollection {
        forests,
        residual_high_degree,
        residual_leafset,
    }
}

/// Outcome of [`key_similarity`].
#[derive(Debug, Clone)]
pub struct KeyOutcome {
    pub cert: SimilarityCertificate,
    pub warnings: Vec<String>,
    /// True when the dense fallback (volume bound on the residual) fired.
    pub fell_back: bool,
}

/// The four-part construction: random partition `A1 ∪ A2 ∪ B1 ∪ B2`,
/// star-forest collections on both A sides, a random `B1 -> B2` seed
/// bijection extended pairwise over the forests, with a volume-bound
/// fallback when the collections stall against a dense residual.
///
/// ```
/// use selfsim::gen::gnp;
/// use selfsim::graph::verify_certificate;
/// use selfsim::greedy::{key_similarity, GreedyConfig};
///
/// let g = gnp(256, 0.0625, 7);
/// let out = key_similarity(&g, &GreedyConfig::default()).unwrap();
/// assert_eq!(verify_certificate(&g, &out.cert), Ok(()));
/// assert!(out.cert.s > 0);
/// ```
pub fn key_similarity(g: &Graph, cfg: &GreedyConfig) -> Result<KeyOutcome, GreedyError> {
    cfg.validate()?;
    let n = g.vertex_count();
    let mut warnings = Vec::new();
    if g.edge_count() == 0 || n < 4 {
        return Ok(KeyOutcome {
            cert: SimilarityCertificate::empty("key", cfg.seed),
            warnings,
            fell_back: false,
        });
    }

    // Median degree drives the quota, mirroring the d of the theory route.
    let mut degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let median_d = degrees[n.div_ceil(2) - 1];
    let nf = n as f64;
    let low = 6.0 * nf.powf(0.5 - cfg.alpha / 16.0);
    let high = (cfg.alpha * nf * nf.ln()).sqrt();
    if (median_d as f64) < low || (median_d as f64) > high {
        warnings.push(format!(
            "degree window violated: median degree {median_d} outside [{low:.2}, {high:.2}]; \
             the theoretical guarantee does not apply"
        ));
    }

    // Seeded shuffle, then round-robin into four parts of near-equal size.
    let mut order: Vec<Vertex> = (0..n).collect();
    {
        let mut rng = prng::rng_for(cfg.seed, 0);
        order.shuffle(&mut rng);
    }
    let mut parts: [Vec<Vertex>; 4] = Default::default();
    for (i, &v) in order.iter().enumerate() {
        parts[i % 4].push(v);
    }
    let [mut a1, mut a2, mut b1, mut b2] = parts;
    // Paired parts must have equal sizes (the seed bijection is total on B1,
    // the A completion is a bijection); drop at most one shuffled vertex per
    // pair when n is not divisible by 4.
    let ka = a1.len().min(a2.len());
    a1.truncate(ka);
    a2.truncate(ka);
    let kb = b1.len().min(b2.len());
    b1.truncate(kb);
    b2.truncate(kb);
    let g1 = BipartiteView::new(g, &a1, &b1);
    let g2 = BipartiteView::new(g, &a2, &b2);

    let quota = cfg.leaf_quota.unwrap_or((median_d / 10).max(1));
    let n_quarter = n.div_ceil(4) as f64;
    let forest_size = match cfg.threshold_mode {
        // The proof's (n')^alpha forests; at most a handful of stars each at
        // desk scale.
        ThresholdMode::Fixed(_) => Some((n_quarter.powf(cfg.alpha) as usize).max(1)),
        // Adaptive: maximal forests, as many as fit.
        ThresholdMode::AdaptiveBest => None,
    };
    let degree_floor = median_d as f64 / 5.0;
    let col1 = collect_forests(&g1, quota, forest_size, degree_floor);
    let col2 = collect_forests(&g2, quota, forest_size, degree_floor);
    let k = col1.forests.len().min(col2.forests.len());

    if k == 0 {
        return Ok(fallback_volume(g, &col1, cfg, warnings));
    }

    let mut best: Option<SimilarityCertificate> = None;
    for r in 0..cfg.restarts {
        let f_b = random_bijection(g1.part_b(), g2.part_b(), cfg.seed, 1 + r as u64);
        let mut f = f_b.clone();
        for j in 0..k {
            // Trim the pair to a common star count; forests are d-regular by
            // construction.
            let mut s1 = col1.forests[j].clone();
            let mut s2 = col2.forests[j].clone();
            let common = s1.stars.len().min(s2.stars.len());
            s1.stars.truncate(common);
            s2.stars.truncate(common);
            if common == 0 {
                continue;
            }
            let (extended, _gain) = forest_pair_similarity(&s1, &s2, &f_b, cfg)?;
            for star in &s1.stars {
                if let Some(img) = extended.get(star.center) {
                    if !f.contains_source(star.center) && !f.contains_target(img) {
                        f.insert(star.center, img).expect("checked fresh");
                    }
                }
            }
        }
        // Arbitrary ascending-id completion over the unmapped A vertices.
        let unused: Vec<Vertex> = g2
            .part_a()
            .iter()
            .copied()
            .filter(|y| !f.contains_target(*y))
            .collect();
        let unmapped: Vec<Vertex> = g1
            .part_a()
            .iter()
            .copied()
            .filter(|x| !f.contains_source(*x))
            .collect();
        for (&x, &y) in unmapped.iter().zip(&unused) {
            f.insert(x, y).expect("fresh pair");
        }
        let cert = crate::bounds::certificate_from_bijection(
            &f,
            g1.edges(),
            g2.edges(),
            "key",
            cfg.seed,
        );
        if best.as_ref().map_or(true, |b| cert.s > b.s) {
            best = Some(cert);
        }
    }
    Ok(KeyOutcome {
        cert: best.expect("restarts >= 1"),
        warnings,
        fell_back: false,
    })
}

/// The dense-residual fallback: the volume bound on the bipartite residual
/// (uncovered high-degree vertices against the stalled forest's leaf union),
/// or on the whole graph when the residual is degenerate.
fn fallback_volume(
    g: &Graph,
    col: &ForestCollection,
    cfg: &GreedyConfig,
    warnings: Vec<String>,
) -> KeyOutcome {
    let mut keep: Vec<Vertex> = col
        .residual_high_degree
        .iter()
        .chain(&col.residual_leafset)
        .copied()
        .collect();
    keep.sort_unstable();
    keep.dedup();
    let residual_cert = if keep.len() >= 2 {
        let (sub, map) = g.induced_subgraph(&keep);
        let res = iso_volume(&sub, ExpectationMode::Derandomized);
        Some(res.cert.lift(&map))
    } else {
        None
    };
    let whole = iso_volume(g, ExpectationMode::Derandomized).cert;
    let mut cert = match residual_cert {
        Some(r) if r.s >= whole.s => r,
        _ => whole,
    };
    cert.method = "key-fallback-volume".to_string();
    cert.seed = cfg.seed;
    KeyOutcome {
        cert,
        warnings,
        fell_back: true,
    }
}
