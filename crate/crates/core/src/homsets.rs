//! Homogeneous sets (cliques and independent sets) and the induced
//! P3 / anti-P3 packing trichotomy.
//!
//! Every graph on `n >= 6` vertices yields one of: `⌈n/6⌉` disjoint induced
//! P3s, `⌈n/6⌉` disjoint induced anti-P3s (an edge plus a vertex adjacent to
//! neither end), or a homogeneous set of more than `⌈n/6⌉` vertices. Outcomes
//! come as certificates that [`verify_certificate`] re-checks from scratch.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::generators::{gnm_sample_with, GenerateError};
use crate::graph::{Graph, VertexSet};
use crate::recognizers::{components_in, is_induced_c5_free};
use crate::rng::substream;

/// Vertex limit for the rejection-sampling experiment.
pub const HOMDIST_MAX_VERTICES: usize = 20;

const HOMDIST_BLOCK: u64 = 1024;
const MIN_ACCEPTANCE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum HomError {
    #[error("the packing trichotomy needs at least 6 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("no certificate found for n = {n}, target {target}")]
    NoCertificate { n: usize, target: usize },
    #[error("the experiment supports at most {HOMDIST_MAX_VERTICES} vertices, got {0}")]
    GraphTooLarge(usize),
    #[error("experiment needs at least one sample")]
    NoSamples,
    #[error("only {accepted} of {samples} samples were induced-C5-free (rate {rate:.2e} < 1e-4)")]
    LowAcceptance { accepted: u64, samples: u64, rate: f64 },
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

/// Branch and bound for a maximum clique with a greedy colouring bound.
struct CliqueSearch<'g> {
    g: &'g Graph,
    best: VertexSet,
    best_len: usize,
    /// Stop as soon as a clique longer than this is found.
    stop_above: Option<usize>,
}

impl CliqueSearch<'_> {
    fn done(&self) -> bool {
        self.stop_above.is_some_and(|k| self.best_len > k)
    }

    /// Candidates in colour-class order with their running colour count.
    fn colour_order(&self, cand: VertexSet) -> Vec<(usize, usize)> {
        let mut order = Vec::with_capacity(cand.len());
        let mut uncoloured = cand;
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured;
            while let Some(v) = q.min() {
                q = q - self.g.neighbours(v) - VertexSet::singleton(v);
                uncoloured.remove(v);
                order.push((v, colour));
            }
        }
        order
    }

    fn expand(&mut self, current: VertexSet, mut cand: VertexSet) {
        let order = self.colour_order(cand);
        for &(v, colour) in order.iter().rev() {
            if current.len() + colour <= self.best_len || self.done() {
                return;
            }
            let with_v = current | VertexSet::singleton(v);
            let next = cand & self.g.neighbours(v);
            if next.is_empty() {
                if with_v.len() > self.best_len {
                    self.best = with_v;
                    self.best_len = with_v.len();
                }
            } else {
                self.expand(with_v, next);
            }
            cand.remove(v);
        }
    }
}

/// A maximum clique, or with `stop_above = Some(k)` the first clique found of size `> k`.
fn clique_search(g: &Graph, floor: usize, stop_above: Option<usize>) -> VertexSet {
    let mut s = CliqueSearch { g, best: VertexSet::EMPTY, best_len: floor, stop_above };
    s.expand(VertexSet::EMPTY, g.vertices());
    s.best
}

/// A maximum clique (lexicographically first among equal-length finds is not promised).
pub fn max_clique(g: &Graph) -> VertexSet {
    clique_search(g, 0, None)
}

pub fn max_independent_set(g: &Graph) -> VertexSet {
    max_clique(&g.complement())
}

pub fn clique_number(g: &Graph) -> usize {
    max_clique(g).len()
}

pub fn independence_number(g: &Graph) -> usize {
    max_independent_set(g).len()
}

/// Some clique with more than `k` vertices, if one exists.
pub fn clique_larger_than(g: &Graph, k: usize) -> Option<VertexSet> {
    let found = clique_search(g, k, Some(k));
    (!found.is_empty()).then_some(found)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HomKind {
    Clique,
    Independent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomReport {
    pub hom: usize,
    pub clique_number: usize,
    pub independence_number: usize,
    pub witness: VertexSet,
    pub kind: HomKind,
}

/// Largest clique or independent set.
pub fn hom(g: &Graph) -> HomReport {
    let clique = max_clique(g);
    let indep = max_independent_set(g);
    let (witness, kind) = if clique.len() >= indep.len() { (clique, HomKind::Clique) } else { (indep, HomKind::Independent) };
    HomReport { hom: witness.len(), clique_number: clique.len(), independence_number: indep.len(), witness, kind }
}

/// A homogeneous set with more than `k` vertices, if one exists.
pub fn homogeneous_set_larger_than(g: &Graph, k: usize) -> Option<(VertexSet, HomKind)> {
    clique_larger_than(g, k)
        .map(|s| (s, HomKind::Clique))
        .or_else(|| clique_larger_than(&g.complement(), k).map(|s| (s, HomKind::Independent)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PackingOutcome {
    /// Triples `[end, middle, end]`.
    P3Packing {
        triples: Vec<[usize; 3]>,
    },
    /// Triples `[a, b, x]` with `ab` the only edge.
    AntiP3Packing {
        triples: Vec<[usize; 3]>,
    },
    HomogeneousSet {
        set: VertexSet,
        kind: HomKind,
    },
}

/// Which step of the construction produced the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSource {
    GreedyP3,
    LargeCluster,
    OneVertexPerCluster,
    Matching,
    /// Fallbacks used only when the construction's counting argument does not apply.
    ExactHomogeneousSet,
    GreedyAntiP3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackingCertificate {
    pub n: usize,
    /// `⌈n/6⌉`: packings need this many triples, homogeneous sets more than this many vertices.
    pub target: usize,
    pub source: CertificateSource,
    #[serde(flatten)]
    pub outcome: PackingOutcome,
}

fn induces_p3(g: &Graph, [a, b, c]: [usize; 3]) -> bool {
    g.has_edge(a, b) && g.has_edge(b, c) && !g.has_edge(a, c)
}

fn induces_anti_p3(g: &Graph, [a, b, x]: [usize; 3]) -> bool {
    g.has_edge(a, b) && !g.has_edge(a, x) && !g.has_edge(b, x)
}

/// Scans triples `a < b < c` of unused vertices lexicographically and keeps
/// every one that `orient` accepts.
fn greedy_triples(g: &Graph, orient: impl Fn(&Graph, usize, usize, usize) -> Option<[usize; 3]>) -> Vec<[usize; 3]> {
    let n = g.n();
    let mut used = VertexSet::EMPTY;
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if used.contains(a) {
                break;
            }
            for c in b + 1..n {
                if used.contains(b) {
                    break;
                }
                if used.contains(c) {
                    continue;
                }
                if let Some(t) = orient(g, a, b, c) {
                    used = used | VertexSet::singleton(a) | VertexSet::singleton(b) | VertexSet::singleton(c);
                    out.push(t);
                }
            }
        }
    }
    out
}

fn orient_p3(g: &Graph, a: usize, b: usize, c: usize) -> Option<[usize; 3]> {
    let (ab, bc, ac) = (g.has_edge(a, b), g.has_edge(b, c), g.has_edge(a, c));
    match (ab, bc, ac) {
        (true, true, false) => Some([a, b, c]),
        (true, false, true) => Some([b, a, c]),
        (false, true, true) => Some([a, c, b]),
        _ => None,
    }
}

fn orient_anti_p3(g: &Graph, a: usize, b: usize, c: usize) -> Option<[usize; 3]> {
    let (ab, bc, ac) = (g.has_edge(a, b), g.has_edge(b, c), g.has_edge(a, c));
    match (ab, bc, ac) {
        (true, false, false) => Some([a, b, c]),
        (false, true, false) => Some([b, c, a]),
        (false, false, true) => Some([a, c, b]),
        _ => None,
    }
}

/// Maximum matching in a bipartite graph given as left-side adjacency lists.
/// Returns `mate[left] = Some(right)`.
pub fn hopcroft_karp(adj: &[Vec<usize>], right_len: usize) -> Vec<Option<usize>> {
    const FREE: usize = usize::MAX;
    let left_len = adj.len();
    let mut mate_l = vec![FREE; left_len];
    let mut mate_r = vec![FREE; right_len];
    let mut dist = vec![0usize; left_len];

    fn bfs(adj: &[Vec<usize>], mate_l: &[usize], mate_r: &[usize], dist: &mut [usize]) -> bool {
        let mut queue = std::collections::VecDeque::new();
        for (u, d) in dist.iter_mut().enumerate() {
            if mate_l[u] == FREE {
                *d = 0;
                queue.push_back(u);
            } else {
                *d = usize::MAX;
            }
        }
        let mut reachable_free = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = mate_r[v];
                if w == FREE {
                    reachable_free = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        reachable_free
    }

    fn dfs(u: usize, adj: &[Vec<usize>], mate_l: &mut [usize], mate_r: &mut [usize], dist: &mut [usize]) -> bool {
        for &v in &adj[u] {
            let w = mate_r[v];
            if w == FREE || (dist[w] == dist[u] + 1 && dfs(w, adj, mate_l, mate_r, dist)) {
                mate_l[u] = v;
                mate_r[v] = u;
                return true;
            }
        }
        dist[u] = usize::MAX;
        false
    }

    while bfs(adj, &mate_l, &mate_r, &mut dist) {
        for u in 0..left_len {
            if mate_l[u] == FREE {
                dfs(u, adj, &mut mate_l, &mut mate_r, &mut dist);
            }
        }
    }
    mate_l.into_iter().map(|v| (v != FREE).then_some(v)).collect()
}

/// Anti-P3s from a cluster graph: disjoint intra-clique edges matched to
/// vertices of other cliques.
fn cluster_anti_p3s(cliques: &[VertexSet], target: usize) -> Vec<[usize; 3]> {
    // (edge, clique index)
    let mut edges: Vec<((usize, usize), usize)> = Vec::new();
    let mut leftovers: Vec<(usize, usize)> = Vec::new();
    for (i, q) in cliques.iter().enumerate() {
        let vs = q.to_vec();
        let mut taken = 0;
        if edges.len() < target {
            for pair in vs.chunks_exact(2) {
                if edges.len() == target {
                    break;
                }
                edges.push(((pair[0], pair[1]), i));
                taken += 2;
            }
        }
        leftovers.extend(vs[taken..].iter().map(|&v| (v, i)));
    }
    leftovers.truncate(edges.len());
    let adj: Vec<Vec<usize>> =
        leftovers.iter().map(|&(_, qx)| edges.iter().enumerate().filter(|(_, &(_, qe))| qe != qx).map(|(j, _)| j).collect()).collect();
    let mate = hopcroft_karp(&adj, edges.len());
    leftovers.iter().zip(mate).filter_map(|(&(x, _), e)| e.map(|j| [edges[j].0 .0, edges[j].0 .1, x])).collect()
}

/// The packing trichotomy with target `⌈n/6⌉`.
pub fn p3_packing_trichotomy(g: &Graph) -> Result<PackingCertificate, HomError> {
    let n = g.n();
    if n < 6 {
        return Err(HomError::TooFewVertices(n));
    }
    let target = n.div_ceil(6);
    let cert = |source, outcome| PackingCertificate { n, target, source, outcome };

    let p3s = greedy_triples(g, orient_p3);
    if p3s.len() >= target {
        return Ok(cert(CertificateSource::GreedyP3, PackingOutcome::P3Packing { triples: p3s }));
    }
    // maximality leaves an induced-P3-free, i.e. cluster, remainder
    let covered: VertexSet = p3s.iter().flatten().copied().collect();
    let cliques = components_in(g, g.vertices() - covered);
    if let Some(&big) = cliques.iter().max_by_key(|q| q.len()) {
        if big.len() > target {
            return Ok(cert(CertificateSource::LargeCluster, PackingOutcome::HomogeneousSet { set: big, kind: HomKind::Clique }));
        }
    }
    if cliques.len() > target {
        let set = cliques.iter().filter_map(|&q| q.min()).collect();
        return Ok(cert(CertificateSource::OneVertexPerCluster, PackingOutcome::HomogeneousSet { set, kind: HomKind::Independent }));
    }
    let matched = cluster_anti_p3s(&cliques, target);
    if matched.len() >= target {
        return Ok(cert(CertificateSource::Matching, PackingOutcome::AntiP3Packing { triples: matched }));
    }
    if let Some((set, kind)) = homogeneous_set_larger_than(g, target) {
        return Ok(cert(CertificateSource::ExactHomogeneousSet, PackingOutcome::HomogeneousSet { set, kind }));
    }
    let anti = greedy_triples(g, orient_anti_p3);
    if anti.len() >= target {
        return Ok(cert(CertificateSource::GreedyAntiP3, PackingOutcome::AntiP3Packing { triples: anti }));
    }
    Err(HomError::NoCertificate { n, target })
}

/// Re-derives every claim of `cert` from `g`.
pub fn verify_certificate(g: &Graph, cert: &PackingCertificate) -> bool {
    if cert.n != g.n() {
        return false;
    }
    let in_range = |v: usize| v < g.n();
    match &cert.outcome {
        PackingOutcome::P3Packing { triples } | PackingOutcome::AntiP3Packing { triples } => {
            let p3 = matches!(cert.outcome, PackingOutcome::P3Packing { .. });
            let mut used = VertexSet::EMPTY;
            for t in triples {
                if !t.iter().all(|&v| in_range(v)) {
                    return false;
                }
                let s: VertexSet = t.iter().copied().collect();
                if s.len() != 3 || !used.is_disjoint(s) {
                    return false;
                }
                used |= s;
                let ok = if p3 { induces_p3(g, *t) } else { induces_anti_p3(g, *t) };
                if !ok {
                    return false;
                }
            }
            triples.len() >= cert.target
        }
        PackingOutcome::HomogeneousSet { set, kind } => {
            if set.iter().any(|v| !in_range(v)) || set.len() <= cert.target {
                return false;
            }
            match kind {
                HomKind::Clique => g.is_clique(*set),
                HomKind::Independent => g.is_independent(*set),
            }
        }
    }
}

/// Distribution of `hom(G)` over `G(n, m)` samples, overall and among the
/// induced-C5-free samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomDistribution {
    pub n: usize,
    pub m: usize,
    pub samples: u64,
    pub seed: u64,
    /// Samples that were induced-C5-free.
    pub accepted: u64,
    /// `overall[h]` = samples with `hom = h`.
    pub overall: Vec<u64>,
    pub conditioned: Vec<u64>,
}

impl HomDistribution {
    fn mean(hist: &[u64]) -> f64 {
        let total: u64 = hist.iter().sum();
        hist.iter().enumerate().map(|(h, &c)| h as f64 * c as f64).sum::<f64>() / total as f64
    }

    /// Mean of `hom/n` over all samples.
    pub fn overall_mean(&self) -> f64 {
        Self::mean(&self.overall) / self.n as f64
    }

    /// Mean of `hom/n` over the accepted samples.
    pub fn conditioned_mean(&self) -> f64 {
        Self::mean(&self.conditioned) / self.n as f64
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.samples as f64
    }
}

pub fn hom_distribution_experiment(n: usize, m: usize, samples: u64, seed: u64) -> Result<HomDistribution, HomError> {
    if n > HOMDIST_MAX_VERTICES {
        return Err(HomError::GraphTooLarge(n));
    }
    if samples == 0 {
        return Err(HomError::NoSamples);
    }
    let blocks = samples.div_ceil(HOMDIST_BLOCK);
    let parts: Vec<(Vec<u64>, Vec<u64>)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = substream(seed, b);
            let mut overall = vec![0u64; n + 1];
            let mut conditioned = vec![0u64; n + 1];
            for _ in 0..HOMDIST_BLOCK.min(samples - b * HOMDIST_BLOCK) {
                let g = gnm_sample_with(n, m, &mut rng)?;
                let h = hom(&g).hom;
                overall[h] += 1;
                if is_induced_c5_free(&g) {
                    conditioned[h] += 1;
                }
            }
            Ok((overall, conditioned))
        })
        .collect::<Result<_, HomError>>()?;
    let mut overall = vec![0u64; n + 1];
    let mut conditioned = vec![0u64; n + 1];
    for (o, c) in parts {
        for h in 0..=n {
            overall[h] += o[h];
            conditioned[h] += c[h];
        }
    }
    let accepted: u64 = conditioned.iter().sum();
    let rate = accepted as f64 / samples as f64;
    if rate < MIN_ACCEPTANCE {
        return Err(HomError::LowAcceptance { accepted, samples, rate });
    }
    Ok(HomDistribution { n, m, samples, seed, accepted, overall, conditioned })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gnm_sample;
    use crate::graph::GraphBuilder;

    fn brute_hom(g: &Graph) -> usize {
        let n = g.n();
        (0u32..1 << n)
            .map(|bits| VertexSet::from_bits(bits as u128))
            .filter(|&s| g.is_clique(s) || g.is_independent(s))
            .map(|s| s.len())
            .max()
            .unwrap()
    }

    #[test]
    fn hom_examples() {
        assert_eq!(hom(&Graph::cycle(5).unwrap()).hom, 2);
        assert_eq!(hom(&Graph::complete(6).unwrap()).hom, 6);
        assert_eq!(hom(&Graph::empty(6).unwrap()).hom, 6);
        assert_eq!(clique_number(&Graph::petersen()), 2);
        assert_eq!(independence_number(&Graph::petersen()), 4);
    }

    #[test]
    fn hom_matches_subset_oracle() {
        for seed in 0..60 {
            let n = 4 + seed as usize % 9;
            let m = (seed as usize * 5) % (n * (n - 1) / 2 + 1);
            let g = gnm_sample(n, m, seed).unwrap();
            let r = hom(&g);
            assert_eq!(r.hom, brute_hom(&g), "seed {seed}");
            assert_eq!(r.witness.len(), r.hom);
            assert!(g.is_clique(r.witness) || g.is_independent(r.witness));
        }
    }

    #[test]
    fn threshold_search() {
        let g = gnm_sample(40, 390, 5).unwrap();
        let w = clique_number(&g);
        assert!(clique_larger_than(&g, w).is_none());
        let found = clique_larger_than(&g, w - 1).unwrap();
        assert!(found.len() >= w && g.is_clique(found));
    }

    #[test]
    fn trichotomy_examples() {
        let k6 = p3_packing_trichotomy(&Graph::complete(6).unwrap()).unwrap();
        assert_eq!(k6.outcome, PackingOutcome::HomogeneousSet { set: VertexSet::full(6), kind: HomKind::Clique });
        let mut two_k3 = GraphBuilder::new(6).unwrap();
        two_k3.add_clique([0, 1, 2].into_iter().collect()).unwrap().add_clique([3, 4, 5].into_iter().collect()).unwrap();
        let c = p3_packing_trichotomy(&two_k3.build()).unwrap();
        assert!(matches!(c.outcome, PackingOutcome::HomogeneousSet { kind: HomKind::Clique, set } if set.len() == 3));
        let p6 = p3_packing_trichotomy(&Graph::path(6).unwrap()).unwrap();
        assert!(matches!(&p6.outcome, PackingOutcome::P3Packing { triples } if triples[0] == [0, 1, 2]));
        assert!(p3_packing_trichotomy(&Graph::cycle(5).unwrap()).is_err());
    }

    #[test]
    fn certificates_verify_and_tampering_fails() {
        for seed in 0..200 {
            let n = 6 + seed as usize % 30;
            let m = (seed as usize * 13) % (n * (n - 1) / 2 + 1);
            let g = gnm_sample(n, m, seed).unwrap();
            let Ok(cert) = p3_packing_trichotomy(&g) else { continue };
            assert!(verify_certificate(&g, &cert), "seed {seed}: {cert:?}");
        }
        let g = Graph::path(6).unwrap();
        let mut cert = p3_packing_trichotomy(&g).unwrap();
        if let PackingOutcome::P3Packing { triples } = &mut cert.outcome {
            triples[0][0] = 5;
        }
        assert!(!verify_certificate(&g, &cert));
        let vacuous = PackingCertificate {
            n: 6,
            target: 0,
            source: CertificateSource::GreedyP3,
            outcome: PackingOutcome::P3Packing { triples: vec![] },
        };
        assert!(verify_certificate(&g, &vacuous));
    }

    #[test]
    fn matching_is_maximum() {
        // complete bipartite minus a perfect matching on 4 + 4
        let adj: Vec<Vec<usize>> = (0..4).map(|i| (0..4).filter(|&j| j != i).collect()).collect();
        assert_eq!(hopcroft_karp(&adj, 4).iter().flatten().count(), 4);
        let star = vec![vec![0], vec![0], vec![0, 1]];
        assert_eq!(hopcroft_karp(&star, 2).iter().flatten().count(), 2);
    }

    #[test]
    fn matching_branch_builds_anti_p3s() {
        // cliques of sizes 5,5,5,5,4 plus two disjoint paths: target 5, two P3s,
        // five clusters none larger than the target
        let mut b = GraphBuilder::new(30).unwrap();
        for start in [0, 5, 10, 15] {
            b.add_clique((start..start + 5).collect()).unwrap();
        }
        b.add_clique((20..24).collect()).unwrap();
        for (u, v) in [(24, 25), (25, 26), (27, 28), (28, 29)] {
            b.add_edge(u, v).unwrap();
        }
        let g = b.build();
        let cert = p3_packing_trichotomy(&g).unwrap();
        assert_eq!(cert.source, CertificateSource::Matching);
        assert!(matches!(&cert.outcome, PackingOutcome::AntiP3Packing { triples } if triples.len() == 5));
        assert!(verify_certificate(&g, &cert));
    }

    #[test]
    fn experiment_shapes() {
        let d = hom_distribution_experiment(5, 5, 5000, 1).unwrap();
        assert_eq!(d.overall.iter().sum::<u64>(), 5000);
        assert_eq!(d.conditioned[2], 0);
        assert!(hom_distribution_experiment(21, 5, 10, 1).is_err());
    }
}
