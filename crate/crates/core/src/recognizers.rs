//! Membership tests for the hereditary classes studied here: induced-C5-free,
//! perfect, generalised split and cluster graphs, plus weak-subgraph containment.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

/// Largest graph accepted by the exact perfect and generalised-split recognizers.
pub const RECOGNIZER_MAX_VERTICES: usize = 20;
/// Largest pattern accepted by [`contains_subgraph`].
pub const PATTERN_MAX_VERTICES: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecognizeError {
    #[error("{what} is exact only up to {limit} vertices, got {n}")]
    GraphTooLarge { what: &'static str, n: usize, limit: usize },
    #[error("induced cycle length must be at least 4, got {0}")]
    CycleTooShort(usize),
    #[error("subgraph patterns may have at most {PATTERN_MAX_VERTICES} vertices, got {0}")]
    PatternTooLarge(usize),
}

fn limit(what: &'static str, g: &Graph) -> Result<(), RecognizeError> {
    if g.n() > RECOGNIZER_MAX_VERTICES {
        Err(RecognizeError::GraphTooLarge { what, n: g.n(), limit: RECOGNIZER_MAX_VERTICES })
    } else {
        Ok(())
    }
}

/// Finds an induced 5-cycle, returned in cyclic order starting from its
/// smallest vertex.
pub fn find_induced_c5(g: &Graph) -> Option<[usize; 5]> {
    // cycle a-b-c-d-e-a with a the minimum, b < e
    for a in 0..g.n() {
        let na = g.neighbours(a);
        let higher = VertexSet::above(a);
        let ends = na & higher;
        for b in ends {
            let nb = g.neighbours(b);
            for e in (ends & VertexSet::above(b)) - nb {
                let ne = g.neighbours(e);
                let cs = (nb & higher) - na - ne - VertexSet::singleton(a);
                if cs.is_empty() {
                    continue;
                }
                let ds = (ne & higher) - na - nb;
                for c in cs {
                    if let Some(d) = (g.neighbours(c) & ds).min() {
                        return Some([a, b, c, d, e]);
                    }
                }
            }
        }
    }
    None
}

pub fn is_induced_c5_free(g: &Graph) -> bool {
    find_induced_c5(g).is_none()
}

/// True iff `s` induces a single cycle (connected and 2-regular, at least 3 vertices).
pub fn induces_cycle(g: &Graph, s: VertexSet) -> bool {
    if s.len() < 3 || s.iter().any(|v| (g.neighbours(v) & s).len() != 2) {
        return false;
    }
    let start = s.min().unwrap();
    let mut seen = VertexSet::singleton(start);
    let mut frontier = seen;
    while !frontier.is_empty() {
        let mut next = VertexSet::EMPTY;
        for v in frontier {
            next |= g.neighbours(v) & s;
        }
        frontier = next - seen;
        seen |= frontier;
    }
    seen == s
}

/// Which induced cycle lengths a search accepts.
#[derive(Clone, Copy)]
enum Lengths {
    Exactly(usize),
    OddAtLeastFive,
}

impl Lengths {
    fn accepts(self, len: usize) -> bool {
        match self {
            Lengths::Exactly(l) => len == l,
            Lengths::OddAtLeastFive => len >= 5 && len % 2 == 1,
        }
    }

    fn can_grow_past(self, len: usize, n: usize) -> bool {
        match self {
            Lengths::Exactly(l) => len < l,
            Lengths::OddAtLeastFive => len < n,
        }
    }
}

/// Depth-first search over induced paths whose first vertex is the minimum
/// of the cycle being built. `blocked` holds closed neighbourhoods of the
/// interior path vertices.
fn extend_hole(g: &Graph, path: &mut Vec<usize>, blocked: VertexSet, lengths: Lengths) -> bool {
    let first = path[0];
    let last = *path.last().unwrap();
    let len = path.len();
    let cand = (g.neighbours(last) & VertexSet::above(first)) - blocked - VertexSet::singleton(first);
    let closers = cand & g.neighbours(first);
    if len >= 3 && lengths.accepts(len + 1) {
        // second vertex < closing vertex fixes the orientation
        let closers = closers & VertexSet::above(path[1]);
        if let Some(w) = closers.min() {
            path.push(w);
            return true;
        }
    }
    if !lengths.can_grow_past(len + 1, g.n()) {
        return false;
    }
    let extenders = cand - g.neighbours(first);
    // after the push, `last` becomes an interior vertex
    let next_blocked = blocked | g.neighbours(last) | VertexSet::singleton(last);
    for w in extenders {
        path.push(w);
        if extend_hole(g, path, next_blocked, lengths) {
            return true;
        }
        path.pop();
    }
    false
}

fn find_hole(g: &Graph, lengths: Lengths) -> Option<Vec<usize>> {
    for first in 0..g.n() {
        for second in g.neighbours(first) & VertexSet::above(first) {
            let mut path = vec![first, second];
            if extend_hole(g, &mut path, VertexSet::EMPTY, lengths) {
                return Some(path);
            }
        }
    }
    None
}

/// Finds a vertex sequence that induces a cycle of exactly `length` vertices.
pub fn find_induced_cycle(g: &Graph, length: usize) -> Result<Option<Vec<usize>>, RecognizeError> {
    if length < 4 {
        return Err(RecognizeError::CycleTooShort(length));
    }
    if length > g.n() {
        return Ok(None);
    }
    Ok(find_hole(g, Lengths::Exactly(length)))
}

pub fn has_induced_cycle(g: &Graph, length: usize) -> Result<bool, RecognizeError> {
    Ok(find_induced_cycle(g, length)?.is_some())
}

/// Finds an induced odd cycle of length at least five.
pub fn find_odd_hole(g: &Graph) -> Option<Vec<usize>> {
    find_hole(g, Lengths::OddAtLeastFive)
}

/// An odd hole, either in the graph itself or in its complement (an odd antihole).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OddHole {
    pub cycle: Vec<usize>,
    pub in_complement: bool,
}

/// Returns an odd hole or odd antihole if one exists.
pub fn perfect_obstruction(g: &Graph) -> Result<Option<OddHole>, RecognizeError> {
    limit("perfect-graph recognition", g)?;
    if let Some(cycle) = find_odd_hole(g) {
        return Ok(Some(OddHole { cycle, in_complement: false }));
    }
    Ok(find_odd_hole(&g.complement()).map(|cycle| OddHole { cycle, in_complement: true }))
}

/// Perfectness via the absence of odd holes and odd antiholes.
pub fn is_perfect(g: &Graph) -> Result<bool, RecognizeError> {
    Ok(perfect_obstruction(g)?.is_none())
}

/// Finds an induced path `[end, middle, end]` inside `within`.
pub fn find_induced_p3_in(g: &Graph, within: VertexSet) -> Option<[usize; 3]> {
    for v in within {
        let nv = g.neighbours(v) & within;
        for u in nv & VertexSet::above(v) {
            let nu = g.neighbours(u) & within;
            let diff = (nu ^ nv) - VertexSet::singleton(u) - VertexSet::singleton(v);
            if let Some(w) = diff.min() {
                return Some(if nu.contains(w) { [v, u, w] } else { [u, v, w] });
            }
        }
    }
    None
}

pub fn find_induced_p3(g: &Graph) -> Option<[usize; 3]> {
    find_induced_p3_in(g, g.vertices())
}

/// A graph is a cluster graph iff it has no induced P3.
pub fn is_cluster_graph(g: &Graph) -> bool {
    find_induced_p3(g).is_none()
}

/// Connected components of `G[within]`, ordered by smallest vertex.
pub fn components_in(g: &Graph, within: VertexSet) -> Vec<VertexSet> {
    let mut left = within;
    let mut out = Vec::new();
    while let Some(s) = left.min() {
        let mut comp = VertexSet::singleton(s);
        let mut frontier = comp;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier {
                next |= g.neighbours(v) & within;
            }
            frontier = next - comp;
            comp |= frontier;
        }
        left = left - comp;
        out.push(comp);
    }
    out
}

/// A generalised clique partition of `G` (or of its complement when
/// `complemented`): a distinguished clique plus cliques with no edges between them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitWitness {
    pub complemented: bool,
    pub distinguished: VertexSet,
    pub cliques: Vec<VertexSet>,
}

impl SplitWitness {
    /// Re-checks the witness against `g` from scratch.
    pub fn verify(&self, g: &Graph) -> bool {
        let h = if self.complemented { g.complement() } else { g.clone() };
        let mut seen = self.distinguished;
        if !h.is_clique(self.distinguished) {
            return false;
        }
        for (i, q) in self.cliques.iter().enumerate() {
            if q.is_empty() || !seen.is_disjoint(*q) || !h.is_clique(*q) {
                return false;
            }
            seen |= *q;
            for other in &self.cliques[i + 1..] {
                if h.edges_between(*q, *other) != 0 {
                    return false;
                }
            }
        }
        seen == h.vertices()
    }

    /// All blocks in order, distinguished block first.
    pub fn blocks(&self) -> Vec<VertexSet> {
        std::iter::once(self.distinguished).chain(self.cliques.iter().copied()).collect()
    }
}

/// Grows the distinguished clique: every induced P3 outside it must lose a vertex to it.
fn split_search(g: &Graph, distinguished: VertexSet) -> Option<VertexSet> {
    let rest = g.vertices() - distinguished;
    let Some(p3) = find_induced_p3_in(g, rest) else {
        return Some(distinguished);
    };
    for x in p3 {
        if distinguished.is_subset(g.neighbours(x)) {
            if let Some(found) = split_search(g, distinguished | VertexSet::singleton(x)) {
                return Some(found);
            }
        }
    }
    None
}

fn clique_partition(g: &Graph) -> Option<(VertexSet, Vec<VertexSet>)> {
    let mut d = split_search(g, VertexSet::EMPTY)?;
    // hand back vertices the cluster part can absorb
    for v in d {
        let rest = (g.vertices() - d) | VertexSet::singleton(v);
        if find_induced_p3_in(g, rest).is_none() {
            d.remove(v);
        }
    }
    Some((d, components_in(g, g.vertices() - d)))
}

/// Returns a generalised clique partition of `G` or of its complement.
pub fn generalised_split_witness(g: &Graph) -> Result<Option<SplitWitness>, RecognizeError> {
    limit("generalised-split recognition", g)?;
    if let Some((distinguished, cliques)) = clique_partition(g) {
        return Ok(Some(SplitWitness { complemented: false, distinguished, cliques }));
    }
    Ok(clique_partition(&g.complement()).map(|(distinguished, cliques)| SplitWitness { complemented: true, distinguished, cliques }))
}

pub fn is_generalised_split(g: &Graph) -> Result<bool, RecognizeError> {
    Ok(generalised_split_witness(g)?.is_some())
}

/// Weak (not necessarily induced) subgraph containment for patterns with at
/// most six vertices.
pub fn contains_subgraph(g: &Graph, f: &Graph) -> Result<bool, RecognizeError> {
    if f.n() > PATTERN_MAX_VERTICES {
        return Err(RecognizeError::PatternTooLarge(f.n()));
    }
    if f.n() > g.n() || f.edge_count() > g.edge_count() {
        return Ok(false);
    }
    // place high-degree pattern vertices first, each next to already placed ones when possible
    let mut order: Vec<usize> = Vec::with_capacity(f.n());
    let mut placed = VertexSet::EMPTY;
    while order.len() < f.n() {
        let pick = (0..f.n())
            .filter(|v| !placed.contains(*v))
            .max_by_key(|&v| ((f.neighbours(v) & placed).len(), f.degree(v), std::cmp::Reverse(v)))
            .unwrap();
        order.push(pick);
        placed.insert(pick);
    }
    let mut image = vec![usize::MAX; f.n()];
    Ok(embed(g, f, &order, 0, &mut image, VertexSet::EMPTY))
}

fn embed(g: &Graph, f: &Graph, order: &[usize], depth: usize, image: &mut [usize], used: VertexSet) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    let need = f.degree(v);
    let mut cand = g.vertices() - used;
    for &u in &order[..depth] {
        if f.has_edge(u, v) {
            cand &= g.neighbours(image[u]);
        }
    }
    for x in cand {
        if g.degree(x) < need {
            continue;
        }
        image[v] = x;
        if embed(g, f, order, depth + 1, image, used | VertexSet::singleton(x)) {
            return true;
        }
    }
    false
}

/// A named membership test used by the census.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassPredicate {
    AllGraphs,
    InducedC5Free,
    Perfect,
    GeneralisedSplit,
    /// No weak copy of the pattern (at most six vertices).
    NoSubgraph(Graph),
    ClusterGraph,
}

impl ClassPredicate {
    pub fn no_subgraph(f: Graph) -> Result<Self, RecognizeError> {
        if f.n() > PATTERN_MAX_VERTICES {
            return Err(RecognizeError::PatternTooLarge(f.n()));
        }
        Ok(ClassPredicate::NoSubgraph(f))
    }

    /// Short tag used on the command line and in output files.
    pub fn tag(&self) -> &'static str {
        match self {
            ClassPredicate::AllGraphs => "all",
            ClassPredicate::InducedC5Free => "c5free",
            ClassPredicate::Perfect => "perfect",
            ClassPredicate::GeneralisedSplit => "gensplit",
            ClassPredicate::NoSubgraph(_) => "nosub",
            ClassPredicate::ClusterGraph => "cluster",
        }
    }

    /// Largest vertex count the predicate can decide exactly.
    pub fn max_vertices(&self) -> usize {
        match self {
            ClassPredicate::Perfect | ClassPredicate::GeneralisedSplit => RECOGNIZER_MAX_VERTICES,
            _ => crate::graph::MAX_VERTICES,
        }
    }

    /// Whether membership is invariant under complementation.
    pub fn is_self_complementary(&self) -> bool {
        matches!(
            self,
            ClassPredicate::AllGraphs | ClassPredicate::InducedC5Free | ClassPredicate::Perfect | ClassPredicate::GeneralisedSplit
        )
    }

    pub fn check(&self, g: &Graph) -> Result<bool, RecognizeError> {
        Ok(match self {
            ClassPredicate::AllGraphs => true,
            ClassPredicate::InducedC5Free => is_induced_c5_free(g),
            ClassPredicate::Perfect => is_perfect(g)?,
            ClassPredicate::GeneralisedSplit => is_generalised_split(g)?,
            ClassPredicate::NoSubgraph(f) => !contains_subgraph(g, f)?,
            ClassPredicate::ClusterGraph => is_cluster_graph(g),
        })
    }
}

impl fmt::Display for ClassPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassPredicate::NoSubgraph(p) => write!(f, "nosub(n={}, m={})", p.n(), p.edge_count()),
            other => f.write_str(other.tag()),
        }
    }
}
