//! Coloured reduced graphs ("types"): extraction from an explicit partition,
//! grey edges and triangles, and coloured-homomorphism search.
//!
//! A type has white (0), grey (½) and black (1) edges and white or black
//! vertices. Extraction cannot certify ε-regularity; pairs are admitted by a
//! sampling proxy and vertices coloured by a subpartition heuristic, and both
//! verdicts are reported in [`TypeDiagnostics`].

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, Partition, VertexSet};
use crate::rng::substream;

/// Pattern and type size limits for the homomorphism search.
pub const HOM_MAX_PATTERN: usize = 8;
pub const HOM_MAX_TYPE: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TypesError {
    #[error("parameter {name} = {value} is outside {domain}")]
    BadParameter { name: &'static str, value: f64, domain: &'static str },
    #[error("the partition needs at least 2 clusters, got {0}")]
    TooFewClusters(usize),
    #[error("clusters must have equal sizes")]
    UnequalClusters,
    #[error("clusters of size {size} are too small for {k_sub}-part subpartitions (need at least {need})")]
    ClustersTooSmall { size: usize, k_sub: usize, need: usize },
    #[error("partition is over {partition} vertices but the graph has {graph}")]
    SizeMismatch { partition: usize, graph: usize },
    #[error("vertex colour {0} is not 0 or 1")]
    BadVertexColour(u8),
    #[error("unknown edge colour {0:?}; expected \"0\", \"half\" or \"1\"")]
    BadEdgeColour(String),
    #[error("vertex {vertex} out of range for a type on {k} vertices")]
    VertexOutOfRange { vertex: usize, k: usize },
    #[error("edge {{{0}, {0}}} is a loop")]
    Loop(usize),
    #[error("homomorphism search limited to patterns of {HOM_MAX_PATTERN} and types of {HOM_MAX_TYPE} vertices, got {f} and {k}")]
    SearchTooLarge { f: usize, k: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeColour {
    White,
    Grey,
    Black,
}

impl EdgeColour {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeColour::White => "0",
            EdgeColour::Grey => "half",
            EdgeColour::Black => "1",
        }
    }

    pub fn parse(s: &str) -> Result<Self, TypesError> {
        match s {
            "0" => Ok(EdgeColour::White),
            "half" => Ok(EdgeColour::Grey),
            "1" => Ok(EdgeColour::Black),
            other => Err(TypesError::BadEdgeColour(other.to_string())),
        }
    }

    /// Swaps white and black; grey is fixed.
    pub fn flipped(self) -> Self {
        match self {
            EdgeColour::White => EdgeColour::Black,
            EdgeColour::Grey => EdgeColour::Grey,
            EdgeColour::Black => EdgeColour::White,
        }
    }

    /// May carry an edge of the pattern.
    fn allows_edge(self) -> bool {
        self != EdgeColour::White
    }

    /// May carry a non-edge of the pattern.
    fn allows_non_edge(self) -> bool {
        self != EdgeColour::Black
    }
}

impl fmt::Display for EdgeColour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    i: usize,
    j: usize,
    col: String,
}

#[derive(Serialize, Deserialize)]
struct ColouredGraphRecord {
    k: usize,
    vcol: Vec<u8>,
    edges: Vec<EdgeRecord>,
}

/// Vertices `0..k` coloured 0 (white) or 1 (black); present edges coloured
/// white, grey or black; absent pairs are non-edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ColouredGraphRecord", try_from = "ColouredGraphRecord")]
pub struct ColouredGraph {
    vcol: Vec<u8>,
    edges: BTreeMap<(usize, usize), EdgeColour>,
}

impl From<ColouredGraph> for ColouredGraphRecord {
    fn from(r: ColouredGraph) -> Self {
        ColouredGraphRecord {
            k: r.k(),
            edges: r.edges.iter().map(|(&(i, j), c)| EdgeRecord { i, j, col: c.as_str().to_string() }).collect(),
            vcol: r.vcol,
        }
    }
}

impl TryFrom<ColouredGraphRecord> for ColouredGraph {
    type Error = TypesError;

    fn try_from(rec: ColouredGraphRecord) -> Result<Self, TypesError> {
        if rec.vcol.len() != rec.k {
            return Err(TypesError::VertexOutOfRange { vertex: rec.vcol.len(), k: rec.k });
        }
        let mut r = ColouredGraph::new(rec.vcol)?;
        for e in rec.edges {
            r.set_edge(e.i, e.j, EdgeColour::parse(&e.col)?)?;
        }
        Ok(r)
    }
}

impl ColouredGraph {
    pub fn new(vcol: Vec<u8>) -> Result<Self, TypesError> {
        if let Some(&bad) = vcol.iter().find(|&&c| c > 1) {
            return Err(TypesError::BadVertexColour(bad));
        }
        Ok(ColouredGraph { vcol, edges: BTreeMap::new() })
    }

    /// Complete coloured graph with every edge the same colour.
    pub fn complete(vcol: Vec<u8>, colour: EdgeColour) -> Result<Self, TypesError> {
        let mut r = ColouredGraph::new(vcol)?;
        let k = r.k();
        for i in 0..k {
            for j in i + 1..k {
                r.set_edge(i, j, colour)?;
            }
        }
        Ok(r)
    }

    pub fn k(&self) -> usize {
        self.vcol.len()
    }

    pub fn vertex_colour(&self, i: usize) -> u8 {
        self.vcol[i]
    }

    pub fn vertex_colours(&self) -> &[u8] {
        &self.vcol
    }

    pub fn set_edge(&mut self, i: usize, j: usize, colour: EdgeColour) -> Result<&mut Self, TypesError> {
        let k = self.k();
        for v in [i, j] {
            if v >= k {
                return Err(TypesError::VertexOutOfRange { vertex: v, k });
            }
        }
        if i == j {
            return Err(TypesError::Loop(i));
        }
        self.edges.insert((i.min(j), i.max(j)), colour);
        Ok(self)
    }

    pub fn edge(&self, i: usize, j: usize) -> Option<EdgeColour> {
        self.edges.get(&(i.min(j), i.max(j))).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), EdgeColour)> + '_ {
        self.edges.iter().map(|(&e, &c)| (e, c))
    }

    pub fn grey_edges(&self) -> Vec<(usize, usize)> {
        self.edges().filter(|&(_, c)| c == EdgeColour::Grey).map(|(e, _)| e).collect()
    }

    /// First grey triangle `i < j < l` in lexicographic order.
    pub fn find_grey_triangle(&self) -> Option<[usize; 3]> {
        let k = self.k();
        let mut grey = vec![VertexSet::EMPTY; k];
        for (i, j) in self.grey_edges() {
            grey[i].insert(j);
            grey[j].insert(i);
        }
        for (i, j) in self.grey_edges() {
            if let Some(l) = (grey[i] & grey[j] & VertexSet::above(j)).min() {
                return Some([i, j, l]);
            }
        }
        None
    }

    pub fn has_grey_triangle(&self) -> bool {
        self.find_grey_triangle().is_some()
    }

    /// Swaps white and black on vertices and edges.
    pub fn flipped(&self) -> Self {
        ColouredGraph {
            vcol: self.vcol.iter().map(|c| 1 - c).collect(),
            edges: self.edges.iter().map(|(&e, c)| (e, c.flipped())).collect(),
        }
    }
}

/// Knobs of the type extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TypeParams {
    /// Largest sub-density deviation a cluster pair may show.
    pub eps: f64,
    /// The same tolerance inside a cluster's subpartition.
    pub eps_sub: f64,
    /// Edge colour threshold: white below `d`, black above `1 - d`.
    pub d: f64,
    /// Number of parts in a vertex-colour subpartition.
    pub k_sub: usize,
    /// Each subpartition part holds at least this fraction of its cluster.
    pub mu_proxy: f64,
    /// Random half-subset probes per pair.
    pub trials: usize,
    pub seed: u64,
}

impl Default for TypeParams {
    fn default() -> Self {
        TypeParams { eps: 0.25, eps_sub: 0.25, d: 0.1, k_sub: 2, mu_proxy: 0.25, trials: 64, seed: 0 }
    }
}

impl TypeParams {
    pub fn validate(&self) -> Result<(), TypesError> {
        for (name, value) in [("eps", self.eps), ("eps_sub", self.eps_sub), ("d", self.d), ("mu_proxy", self.mu_proxy)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(TypesError::BadParameter { name, value, domain: "(0, 1)" });
            }
        }
        if self.k_sub < 2 {
            return Err(TypesError::BadParameter { name: "k_sub", value: self.k_sub as f64, domain: "integers >= 2" });
        }
        Ok(())
    }
}

fn density(g: &Graph, a: VertexSet, b: VertexSet) -> f64 {
    g.edges_between(a, b) as f64 / (a.len() * b.len()) as f64
}

fn random_half<R: Rng + ?Sized>(rng: &mut R, s: VertexSet) -> VertexSet {
    let vs = s.to_vec();
    sample(rng, vs.len(), vs.len().div_ceil(2)).into_iter().map(|i| vs[i]).collect()
}

/// Largest deviation of a random half-subset density from the pair density.
fn proxy_deviation<R: Rng + ?Sized>(g: &Graph, a: VertexSet, b: VertexSet, trials: usize, rng: &mut R) -> f64 {
    let whole = density(g, a, b);
    (0..trials).map(|_| (density(g, random_half(rng, a), random_half(rng, b)) - whole).abs()).fold(0.0, f64::max)
}

fn colour_of_density(x: f64, d: f64) -> EdgeColour {
    if x < d {
        EdgeColour::White
    } else if x > 1.0 - d {
        EdgeColour::Black
    } else {
        EdgeColour::Grey
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDiagnostic {
    pub i: usize,
    pub j: usize,
    pub density: f64,
    pub max_deviation: f64,
    /// Passed the regularity proxy, so the pair is an edge of the type.
    pub admitted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexDiagnostic {
    pub i: usize,
    pub internal_density: f64,
    pub sparse_found: bool,
    pub dense_found: bool,
    /// Colour decided by internal density because the search was inconclusive.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeDiagnostics {
    pub pairs: Vec<PairDiagnostic>,
    pub vertices: Vec<VertexDiagnostic>,
    /// Cluster pairs that failed the proxy (non-edges of the type).
    pub rejected_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeExtraction {
    #[serde(rename = "type")]
    pub coloured: ColouredGraph,
    pub diagnostics: TypeDiagnostics,
}

/// Greedy seeding plus improving swaps for `k` parts of `w` vertices inside
/// `block` with few (sparse) or many (dense) edges between parts.
fn subpartition_search<R: Rng + ?Sized>(
    g: &Graph,
    block: VertexSet,
    k: usize,
    w: usize,
    dense: bool,
    params: &TypeParams,
    rng: &mut R,
) -> bool {
    // work in the graph whose cross edges we minimise
    let h = if dense { g.complement() } else { g.clone() };
    let mut order = block.to_vec();
    order.sort_by_key(|&v| ((h.neighbours(v) & block).len(), v));
    let mut parts = vec![VertexSet::EMPTY; k];
    let mut placed = VertexSet::EMPTY;
    for &v in &order {
        let others = |p: usize| placed - parts[p];
        let best = (0..k).filter(|&p| parts[p].len() < w).min_by_key(|&p| ((h.neighbours(v) & others(p)).len(), p));
        let Some(p) = best else { break };
        parts[p].insert(v);
        placed.insert(v);
    }
    let cost = |parts: &[VertexSet]| -> usize {
        let all: VertexSet = parts.iter().fold(VertexSet::EMPTY, |a, &b| a | b);
        parts.iter().map(|&p| h.edges_between(p, all - p)).sum()
    };
    let mut current = cost(&parts);
    for _ in 0..4 {
        let mut improved = false;
        for p in 0..k {
            for v in parts[p] {
                for u in block - placed {
                    let mut trial = parts.clone();
                    trial[p].remove(v);
                    trial[p].insert(u);
                    let c = cost(&trial);
                    if c < current {
                        current = c;
                        placed.remove(v);
                        placed.insert(u);
                        parts = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    for a in 0..k {
        for b in a + 1..k {
            let x = density(g, parts[a], parts[b]);
            let side_ok = if dense { x >= 0.5 } else { x < 0.5 };
            if !side_ok || proxy_deviation(g, parts[a], parts[b], params.trials, rng) > params.eps_sub {
                return false;
            }
        }
    }
    true
}

/// Builds the coloured reduced graph of `g` over the clusters of `partition`.
pub fn extract_type(g: &Graph, partition: &Partition, params: &TypeParams) -> Result<TypeExtraction, TypesError> {
    params.validate()?;
    if partition.n() != g.n() {
        return Err(TypesError::SizeMismatch { partition: partition.n(), graph: g.n() });
    }
    let clusters = partition.clusters();
    let k = clusters.len();
    if k < 2 {
        return Err(TypesError::TooFewClusters(k));
    }
    if !partition.is_equipartition() {
        return Err(TypesError::UnequalClusters);
    }
    let size = clusters[0].len();
    if size < 2 * params.k_sub {
        return Err(TypesError::ClustersTooSmall { size, k_sub: params.k_sub, need: 2 * params.k_sub });
    }

    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        substream(params.seed, stream)
    };

    let mut vcol = Vec::with_capacity(k);
    let mut vertices = Vec::with_capacity(k);
    let w = ((params.mu_proxy * size as f64).ceil() as usize).max(1);
    for (i, &block) in clusters.iter().enumerate() {
        let feasible = params.k_sub * w <= size;
        let sparse_found = feasible && subpartition_search(g, block, params.k_sub, w, false, params, &mut next_rng());
        let dense_found = feasible && subpartition_search(g, block, params.k_sub, w, true, params, &mut next_rng());
        let pairs_inside = size * (size - 1) / 2;
        let internal_density = g.edges_within(block) as f64 / pairs_inside as f64;
        let fallback = sparse_found == dense_found;
        let colour = if fallback { u8::from(internal_density >= 0.5) } else { u8::from(dense_found) };
        vcol.push(colour);
        vertices.push(VertexDiagnostic { i, internal_density, sparse_found, dense_found, fallback });
    }

    let mut coloured = ColouredGraph::new(vcol)?;
    let mut pairs = Vec::new();
    let mut rejected_pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let x = density(g, clusters[i], clusters[j]);
            let max_deviation = proxy_deviation(g, clusters[i], clusters[j], params.trials, &mut next_rng());
            let admitted = max_deviation <= params.eps;
            if admitted {
                coloured.set_edge(i, j, colour_of_density(x, params.d))?;
            } else {
                rejected_pairs.push((i, j));
            }
            pairs.push(PairDiagnostic { i, j, density: x, max_deviation, admitted });
        }
    }
    Ok(TypeExtraction { coloured, diagnostics: TypeDiagnostics { pairs, vertices, rejected_pairs } })
}

/// Whether `u, v` (distinct pattern vertices) may map to `a, b`.
fn pair_allowed(f: &Graph, r: &ColouredGraph, u: usize, v: usize, a: usize, b: usize) -> bool {
    let adjacent = f.has_edge(u, v);
    if a == b {
        r.vertex_colour(a) == u8::from(adjacent)
    } else {
        match r.edge(a, b) {
            None => false,
            Some(c) if adjacent => c.allows_edge(),
            Some(c) => c.allows_non_edge(),
        }
    }
}

/// Checks the three defining conditions for the map `h`.
pub fn is_coloured_homomorphism(f: &Graph, r: &ColouredGraph, h: &[usize]) -> bool {
    h.len() == f.n() && h.iter().all(|&a| a < r.k()) && (0..f.n()).all(|u| (u + 1..f.n()).all(|v| pair_allowed(f, r, u, v, h[u], h[v])))
}

fn extend(f: &Graph, r: &ColouredGraph, h: &mut Vec<usize>) -> bool {
    let u = h.len();
    if u == f.n() {
        return true;
    }
    for a in 0..r.k() {
        if (0..u).all(|v| pair_allowed(f, r, v, u, h[v], a)) {
            h.push(a);
            if extend(f, r, h) {
                return true;
            }
            h.pop();
        }
    }
    false
}

/// A coloured homomorphism `F → R` found by backtracking, if any exists.
pub fn coloured_homomorphism(f: &Graph, r: &ColouredGraph) -> Result<Option<Vec<usize>>, TypesError> {
    if f.n() > HOM_MAX_PATTERN || r.k() > HOM_MAX_TYPE {
        return Err(TypesError::SearchTooLarge { f: f.n(), k: r.k() });
    }
    let mut h = Vec::with_capacity(f.n());
    Ok(extend(f, r, &mut h).then_some(h))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepEntry {
    pub vertex_colours: [u8; 3],
    pub witness: Option<Vec<usize>>,
}

/// `C5 → T` for the all-grey triangle `T` under each of its 8 vertex colourings.
pub fn grey_triangle_c5_sweep() -> Vec<SweepEntry> {
    let c5 = Graph::cycle(5).expect("five vertices");
    (0u8..8)
        .map(|bits| {
            let vertex_colours = [bits >> 2 & 1, bits >> 1 & 1, bits & 1];
            let t = ColouredGraph::complete(vertex_colours.to_vec(), EdgeColour::Grey).expect("colours are bits");
            let witness = coloured_homomorphism(&c5, &t).expect("within limits");
            SweepEntry { vertex_colours, witness }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn set(vs: &[usize]) -> VertexSet {
        vs.iter().copied().collect()
    }

    #[test]
    fn extraction_examples() {
        let mut b = GraphBuilder::new(8).unwrap();
        for u in 0..4 {
            for v in 4..8 {
                b.add_edge(u, v).unwrap();
            }
        }
        let k44 = b.build();
        let p = Partition::new(8, vec![VertexSet::EMPTY, set(&[0, 1, 2, 3]), set(&[4, 5, 6, 7])]).unwrap();
        let t = extract_type(&k44, &p, &TypeParams::default()).unwrap();
        assert_eq!(t.coloured.edge(0, 1), Some(EdgeColour::Black));
        assert_eq!(t.coloured.vertex_colours(), &[0, 0]);

        let mut b = GraphBuilder::new(8).unwrap();
        b.add_clique(set(&[0, 1, 2, 3])).unwrap().add_clique(set(&[4, 5, 6, 7])).unwrap();
        let t = extract_type(&b.build(), &p, &TypeParams::default()).unwrap();
        assert_eq!(t.coloured.edge(0, 1), Some(EdgeColour::White));
        assert_eq!(t.coloured.vertex_colours(), &[1, 1]);
    }

    #[test]
    fn extraction_errors() {
        let g = Graph::empty(8).unwrap();
        let one = Partition::new(8, vec![VertexSet::EMPTY, VertexSet::full(8)]).unwrap();
        assert_eq!(extract_type(&g, &one, &TypeParams::default()), Err(TypesError::TooFewClusters(1)));
        let small = Partition::new(8, vec![VertexSet::EMPTY, set(&[0, 1, 2]), set(&[3, 4, 5])]).unwrap();
        assert!(matches!(extract_type(&g, &small, &TypeParams::default()), Err(TypesError::ClustersTooSmall { .. })));
        let uneven = Partition::new(8, vec![VertexSet::EMPTY, set(&[0, 1, 2, 3]), set(&[4, 5, 6, 7]), set(&[])]).unwrap();
        assert_eq!(extract_type(&g, &uneven, &TypeParams::default()), Err(TypesError::UnequalClusters));
        let bad = TypeParams { d: 1.5, ..TypeParams::default() };
        assert!(matches!(extract_type(&g, &one, &bad), Err(TypesError::BadParameter { name: "d", .. })));
    }

    #[test]
    fn thresholds_are_strict() {
        assert_eq!(colour_of_density(0.1, 0.1), EdgeColour::Grey);
        assert_eq!(colour_of_density(0.9, 0.1), EdgeColour::Grey);
        assert_eq!(colour_of_density(0.09, 0.1), EdgeColour::White);
        assert_eq!(colour_of_density(0.91, 0.1), EdgeColour::Black);
    }

    #[test]
    fn grey_triangles() {
        let t = ColouredGraph::complete(vec![0, 0, 0], EdgeColour::Grey).unwrap();
        assert!(t.has_grey_triangle());
        let mut u = t.clone();
        u.set_edge(1, 2, EdgeColour::Black).unwrap();
        assert!(!u.has_grey_triangle());
        assert_eq!(u.grey_edges(), vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn homomorphism_examples() {
        let k2 = Graph::complete(2).unwrap();
        let black = ColouredGraph::new(vec![1]).unwrap();
        assert_eq!(coloured_homomorphism(&k2, &black).unwrap(), Some(vec![0, 0]));
        let white = ColouredGraph::new(vec![0]).unwrap();
        assert_eq!(coloured_homomorphism(&k2, &white).unwrap(), None);
        let big = Graph::empty(9).unwrap();
        assert!(coloured_homomorphism(&big, &white).is_err());
    }

    #[test]
    fn sweep_finds_all_witnesses() {
        let c5 = Graph::cycle(5).unwrap();
        for e in grey_triangle_c5_sweep() {
            let t = ColouredGraph::complete(e.vertex_colours.to_vec(), EdgeColour::Grey).unwrap();
            let h = e.witness.expect("witness exists");
            assert!(is_coloured_homomorphism(&c5, &t, &h));
        }
    }

    #[test]
    fn json_shape() {
        let mut r = ColouredGraph::new(vec![0, 1]).unwrap();
        r.set_edge(0, 1, EdgeColour::Grey).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"k":2,"vcol":[0,1],"edges":[{"i":0,"j":1,"col":"half"}]}"#);
        let back: ColouredGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<ColouredGraph>(r#"{"k":1,"vcol":[2],"edges":[]}"#).is_err());
    }
}
