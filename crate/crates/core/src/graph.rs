//! Small labeled graphs with one-word-per-vertex bitset adjacency.
//!
//! Vertices are the dense labels `0..n`. A [`Graph`] is an immutable value;
//! edges are added through [`GraphBuilder`] and sealed with
//! [`GraphBuilder::build`]. Neighbourhoods are stored as `u128` words, which
//! caps graphs at [`MAX_VERTICES`] vertices.

use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, BitXor, Not, Sub};

use num_rational::Ratio;
use thiserror::Error;

/// Largest supported vertex count (one `u128` word per neighbourhood).
pub const MAX_VERTICES: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph has {0} vertices, at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex sets must be nonempty")]
    EmptySet,
    #[error("vertex sets must be disjoint")]
    OverlappingSets,
    #[error("edge index {index} out of range for {n} vertices")]
    EdgeIndexOutOfRange { index: usize, n: usize },
    #[error("partition blocks must be pairwise disjoint")]
    OverlappingBlocks,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A set of vertex labels stored as a single bit word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VertexSet(u128);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    #[inline]
    pub const fn from_bits(bits: u128) -> Self {
        VertexSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u128 {
        self.0
    }

    /// The set `{0, .., n-1}`.
    #[inline]
    pub const fn full(n: usize) -> Self {
        if n >= 128 {
            VertexSet(u128::MAX)
        } else {
            VertexSet((1u128 << n) - 1)
        }
    }

    #[inline]
    pub const fn singleton(v: usize) -> Self {
        VertexSet(1u128 << v)
    }

    /// Labels strictly greater than `v` (within the word).
    #[inline]
    pub const fn above(v: usize) -> Self {
        if v >= 127 {
            VertexSet(0)
        } else {
            VertexSet(!((1u128 << (v + 1)) - 1))
        }
    }

    #[inline]
    pub const fn contains(self, v: usize) -> bool {
        v < 128 && (self.0 >> v) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u128 << v;
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u128 << v);
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    #[inline]
    pub fn max(self) -> Option<usize> {
        (self.0 != 0).then(|| 127 - self.0.leading_zeros() as usize)
    }

    #[inline]
    pub const fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Iterates the members in increasing order.
    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct VertexIter(u128);

impl Iterator for VertexIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for VertexIter {}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = VertexIter;
    fn into_iter(self) -> VertexIter {
        self.iter()
    }
}

impl serde::Serialize for VertexSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl BitAnd for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn bitand(self, rhs: Self) -> Self {
        VertexSet(self.0 & rhs.0)
    }
}

impl BitAndAssign for VertexSet {
    #[inline]
    fn bitand_assign(&mut self, rhs: Self) {
        self.0 &= rhs.0;
    }
}

impl BitOr for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn bitor(self, rhs: Self) -> Self {
        VertexSet(self.0 | rhs.0)
    }
}

impl BitOrAssign for VertexSet {
    #[inline]
    fn bitor_assign(&mut self, rhs: Self) {
        self.0 |= rhs.0;
    }
}

impl BitXor for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn bitxor(self, rhs: Self) -> Self {
        VertexSet(self.0 ^ rhs.0)
    }
}

impl Sub for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        VertexSet(self.0 & !rhs.0)
    }
}

impl Not for VertexSet {
    type Output = VertexSet;
    #[inline]
    fn not(self) -> Self {
        VertexSet(!self.0)
    }
}

/// Immutable simple graph on the vertex labels `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Graph, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(Graph { n, adj: vec![VertexSet::EMPTY; n] })
    }

    pub fn complete(n: usize) -> Result<Graph, GraphError> {
        Ok(Graph::empty(n)?.complement())
    }

    /// The cycle `0-1-..-(n-1)-0`. Requires `n >= 3`.
    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n)?;
        for i in 0..n {
            b.add_edge(i, (i + 1) % n)?;
        }
        Ok(b.build())
    }

    /// The path `0-1-..-(n-1)`.
    pub fn path(n: usize) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n)?;
        for i in 1..n {
            b.add_edge(i - 1, i)?;
        }
        Ok(b.build())
    }

    /// The Petersen graph: outer 5-cycle `0..5`, inner pentagram `5..10`.
    pub fn petersen() -> Graph {
        let mut b = GraphBuilder::new(10).expect("10 vertices");
        for i in 0..5 {
            b.add_edge(i, (i + 1) % 5).unwrap();
            b.add_edge(i, i + 5).unwrap();
            b.add_edge(5 + i, 5 + (i + 2) % 5).unwrap();
        }
        b.build()
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut b = GraphBuilder::new(n)?;
        for &(u, v) in edges {
            if b.has_edge(u, v)? {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Builds a graph from the set of edge ranks present in `mask`
    /// (bit `r` set means edge `edge_unrank(n, r)` is present).
    pub fn from_edge_mask(n: usize, mask: u128) -> Result<Graph, GraphError> {
        let slots = pair_count(n);
        if slots < 128 && mask >> slots != 0 {
            let index = 127 - mask.leading_zeros() as usize;
            return Err(GraphError::EdgeIndexOutOfRange { index, n });
        }
        let mut g = Graph::empty(n)?;
        let mut bits = mask;
        while bits != 0 {
            let r = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (i, j) = edge_unrank(n, r)?;
            g.toggle_edge_unchecked(i, j);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn neighbours(&self, v: usize) -> VertexSet {
        self.adj[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|s| s.len()).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (self.adj[i] & VertexSet::above(i)).iter().map(move |j| (i, j)))
    }

    /// Bit `r` is set iff the edge of rank `r` is present.
    pub fn edge_mask(&self) -> u128 {
        assert!(pair_count(self.n) <= 128, "edge mask needs at most 128 vertex pairs");
        self.edges().map(|(i, j)| 1u128 << edge_rank_unchecked(self.n, i, j)).fold(0, |a, b| a | b)
    }

    pub fn complement(&self) -> Graph {
        let all = VertexSet::full(self.n);
        let adj = (0..self.n).map(|v| all - self.adj[v] - VertexSet::singleton(v)).collect();
        Graph { n: self.n, adj }
    }

    /// The subgraph induced by `s`, relabeled by increasing original label.
    pub fn induced_subgraph(&self, s: VertexSet) -> Result<Graph, GraphError> {
        if let Some(v) = s.max() {
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        let labels = s.to_vec();
        let adj = labels
            .iter()
            .map(|&v| {
                let nb = self.adj[v] & s;
                labels.iter().enumerate().filter(|(_, &u)| nb.contains(u)).map(|(k, _)| k).collect()
            })
            .collect();
        Ok(Graph { n: labels.len(), adj })
    }

    /// Number of edges with both ends in `s`.
    pub fn edges_within(&self, s: VertexSet) -> usize {
        s.iter().map(|v| (self.adj[v] & s).len()).sum::<usize>() / 2
    }

    /// Number of edges between the disjoint sets `a` and `b`.
    pub fn edges_between(&self, a: VertexSet, b: VertexSet) -> usize {
        a.iter().map(|v| (self.adj[v] & b).len()).sum()
    }

    /// `e(A,B) / (|A||B|)` as an exact fraction.
    pub fn pair_density(&self, a: VertexSet, b: VertexSet) -> Result<Ratio<u64>, GraphError> {
        if a.is_empty() || b.is_empty() {
            return Err(GraphError::EmptySet);
        }
        if !a.is_disjoint(b) {
            return Err(GraphError::OverlappingSets);
        }
        for s in [a, b] {
            let v = s.max().unwrap();
            if v >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        let e = self.edges_between(a, b) as u64;
        Ok(Ratio::new(e, (a.len() * b.len()) as u64))
    }

    /// True iff `s` induces a clique.
    pub fn is_clique(&self, s: VertexSet) -> bool {
        s.iter().all(|v| (s - VertexSet::singleton(v)).is_subset(self.adj[v]))
    }

    /// True iff `s` induces an independent set.
    pub fn is_independent(&self, s: VertexSet) -> bool {
        s.iter().all(|v| self.adj[v].is_disjoint(s))
    }

    /// Flips the pair `{u, v}` in place. Only for crate-internal hot loops
    /// that own their graph exclusively.
    #[inline]
    pub(crate) fn toggle_edge_unchecked(&mut self, u: usize, v: usize) {
        self.adj[u].0 ^= 1u128 << v;
        self.adj[v].0 ^= 1u128 << u;
    }

    /// Canonical text form: `n m`, then one `i j` line per edge in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edge_count());
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=", self.n)?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Mutable graph under construction; [`build`](GraphBuilder::build) seals it.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    graph: Graph,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        Ok(GraphBuilder { graph: Graph::empty(n)? })
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.graph.n;
        for x in [u, v] {
            if x >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> Result<bool, GraphError> {
        self.check_pair(u, v)?;
        Ok(self.graph.has_edge(u, v))
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<&mut Self, GraphError> {
        self.check_pair(u, v)?;
        self.graph.adj[u].insert(v);
        self.graph.adj[v].insert(u);
        Ok(self)
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<&mut Self, GraphError> {
        self.check_pair(u, v)?;
        self.graph.adj[u].remove(v);
        self.graph.adj[v].remove(u);
        Ok(self)
    }

    /// Makes every pair inside `s` an edge.
    pub fn add_clique(&mut self, s: VertexSet) -> Result<&mut Self, GraphError> {
        let vs = s.to_vec();
        for (k, &u) in vs.iter().enumerate() {
            for &v in &vs[k + 1..] {
                self.add_edge(u, v)?;
            }
        }
        Ok(self)
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn build(self) -> Graph {
        self.graph
    }
}

impl From<Graph> for GraphBuilder {
    fn from(graph: Graph) -> Self {
        GraphBuilder { graph }
    }
}

/// `C(n, 2)`, the number of vertex pairs.
#[inline]
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[inline]
fn edge_rank_unchecked(n: usize, i: usize, j: usize) -> usize {
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Lexicographic rank of the pair `(i, j)`, `i < j < n`, in `0..C(n,2)`.
pub fn edge_rank(n: usize, i: usize, j: usize) -> Result<usize, GraphError> {
    if j >= n {
        return Err(GraphError::VertexOutOfRange { vertex: j, n });
    }
    if i >= j {
        return Err(GraphError::VertexOutOfRange { vertex: i, n: j });
    }
    Ok(edge_rank_unchecked(n, i, j))
}

/// Inverse of [`edge_rank`].
pub fn edge_unrank(n: usize, index: usize) -> Result<(usize, usize), GraphError> {
    if index >= pair_count(n) {
        return Err(GraphError::EdgeIndexOutOfRange { index, n });
    }
    let mut i = 0;
    let mut row_start = 0;
    loop {
        let row_len = n - i - 1;
        if index < row_start + row_len {
            return Ok((i, i + 1 + index - row_start));
        }
        row_start += row_len;
        i += 1;
    }
}

/// Vertex partition `V_0, V_1, .., V_k`; `V_0` is the (possibly empty) exceptional set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    blocks: Vec<VertexSet>,
}

impl Partition {
    /// `blocks[0]` is the exceptional set; the rest are clusters.
    pub fn new(n: usize, blocks: Vec<VertexSet>) -> Result<Partition, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut seen = VertexSet::EMPTY;
        for &b in &blocks {
            if let Some(v) = b.max() {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if !seen.is_disjoint(b) {
                return Err(GraphError::OverlappingBlocks);
            }
            seen |= b;
        }
        let mut blocks = blocks;
        if blocks.is_empty() {
            blocks.push(VertexSet::EMPTY);
        }
        Ok(Partition { n, blocks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn exceptional(&self) -> VertexSet {
        self.blocks[0]
    }

    pub fn clusters(&self) -> &[VertexSet] {
        &self.blocks[1..]
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    /// True iff all clusters have the same size.
    pub fn is_equipartition(&self) -> bool {
        let c = self.clusters();
        c.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// Parses one line per block; the first line is the exceptional set and may be empty.
    pub fn parse(n: usize, text: &str) -> Result<Partition, GraphError> {
        let mut blocks = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let mut block = VertexSet::EMPTY;
            for tok in line.split_whitespace() {
                let v: usize =
                    tok.parse().map_err(|_| GraphError::Parse { line: lineno + 1, message: format!("bad vertex label {tok:?}") })?;
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
                block.insert(v);
            }
            blocks.push(block);
        }
        // trailing blank lines after the clusters carry no blocks
        while blocks.len() > 1 && blocks.last().is_some_and(|b| b.is_empty()) {
            blocks.pop();
        }
        Partition::new(n, blocks)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let labels: Vec<String> = b.iter().map(|v| v.to_string()).collect();
            out.push_str(&labels.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse { line, message: message.into() }
}

/// Parses one or more graphs in the text format, separated by blank lines.
pub fn parse_graphs(text: &str) -> Result<Vec<Graph>, GraphError> {
    let mut graphs = Vec::new();
    let mut lines = text.lines().enumerate().peekable();
    loop {
        while lines.peek().is_some_and(|(_, l)| l.trim().is_empty()) {
            lines.next();
        }
        let Some((lineno, header)) = lines.next() else { break };
        let nums: Vec<&str> = header.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(parse_err(lineno + 1, "expected header \"n m\""));
        }
        let n: usize = nums[0].parse().map_err(|_| parse_err(lineno + 1, "bad vertex count"))?;
        let m: usize = nums[1].parse().map_err(|_| parse_err(lineno + 1, "bad edge count"))?;
        let mut b = GraphBuilder::new(n)?;
        for k in 0..m {
            let Some((ln, line)) = lines.next() else {
                return Err(parse_err(lineno + 2 + k, format!("expected {m} edge lines, found {k}")));
            };
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 2 {
                return Err(parse_err(ln + 1, "expected edge line \"i j\""));
            }
            let u: usize = t[0].parse().map_err(|_| parse_err(ln + 1, "bad vertex label"))?;
            let v: usize = t[1].parse().map_err(|_| parse_err(ln + 1, "bad vertex label"))?;
            if b.has_edge(u, v).map_err(|e| parse_err(ln + 1, e.to_string()))? {
                return Err(parse_err(ln + 1, format!("duplicate edge {u} {v}")));
            }
            b.add_edge(u, v)?;
        }
        if let Some((ln, l)) = lines.peek() {
            if !l.trim().is_empty() {
                return Err(parse_err(ln + 1, "more edge lines than the header declares"));
            }
        }
        graphs.push(b.build());
    }
    Ok(graphs)
}

/// Parses exactly one graph.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut gs = parse_graphs(text)?;
    match gs.len() {
        1 => Ok(gs.pop().unwrap()),
        k => Err(parse_err(1, format!("expected one graph, found {k}"))),
    }
}
