//! Uniform samplers for the generalised split families used in the lower
//! bound, their exact family sizes, and the `G(n, m)` baseline.
//!
//! Each family fixes one scaffold: `V_1` is always the first `⌈n/2⌉` labels
//! and the remaining labels form the other side. Only the free edges between
//! `V_1` and the rest are random, so the family size is a single binomial.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::entropy::log2_binomial;
use crate::graph::{edge_unrank, pair_count, Graph, GraphBuilder, GraphError, VertexSet};
use crate::rng::substream;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenerateError {
    #[error("{m} edges do not fit: the construction has room for at most {max}")]
    TooManyEdges { m: usize, max: usize },
    #[error("no part count k puts the free-edge budget for n = {n}, m = {m} in [n^2/8 - n, n^2/8 + n]")]
    NoFeasibleK { n: usize, m: usize },
    #[error("complement construction needs m > C(n,2)/2 = {half}, got m = {m}")]
    NotHighDensity { m: usize, half: f64 },
    #[error("edge probability {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    BipartiteLow,
    KPartiteMid,
    ComplementHigh,
}

/// A fully determined construction: scaffold plus free-edge budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitConstruction {
    pub kind: SplitKind,
    pub n: usize,
    /// Edge count of the emitted graphs.
    pub m: usize,
    /// Part count (k-partite form only).
    pub k: Option<usize>,
    /// Free edges placed between `V_1` and the rest.
    pub free_edges: usize,
    /// Number of `V_1`-to-rest slots the free edges are drawn from.
    pub free_slots: usize,
    /// Edges fixed by the scaffold.
    pub scaffold_edges: usize,
    /// `|V_1|`, `|V_2|`, then the singleton parts.
    pub part_sizes: Vec<usize>,
    /// True when `n` is odd and the halves were rounded to `⌈n/2⌉` / `⌊n/2⌋`.
    pub rounded: bool,
    /// For the complement form: the low-density construction being complemented.
    pub base: Option<Box<SplitConstruction>>,
}

fn halves(n: usize) -> (usize, usize) {
    (n.div_ceil(2), n / 2)
}

/// Bipartite form: sides `⌈n/2⌉`, `⌊n/2⌋`, `m` cross edges.
pub fn plan_bipartite(n: usize, m: usize) -> Result<SplitConstruction, GenerateError> {
    Graph::empty(n)?;
    let (a, b) = halves(n);
    if m > a * b {
        return Err(GenerateError::TooManyEdges { m, max: a * b });
    }
    Ok(SplitConstruction {
        kind: SplitKind::BipartiteLow,
        n,
        m,
        k: None,
        free_edges: m,
        free_slots: a * b,
        scaffold_edges: 0,
        part_sizes: vec![a, b],
        rounded: n % 2 == 1,
        base: None,
    })
}

/// k-partite form: `V_1` of size `⌈n/2⌉`, `V_2` of size `⌊n/2⌋ - k + 2` and
/// `k - 2` singletons, complete between the non-first parts, with the smallest
/// `k >= 2` whose free-edge budget `x` lies in `[n²/8 - n, n²/8 + n]`.
pub fn plan_kpartite(n: usize, m: usize) -> Result<SplitConstruction, GenerateError> {
    Graph::empty(n)?;
    let (a, r) = halves(n);
    let (lo8, hi8) = ((n * n).saturating_sub(8 * n), n * n + 8 * n);
    // V_2 must stay nonempty: k - 2 <= r - 1
    for j in 0..r {
        let scaffold = j * (r - j) + j * j.saturating_sub(1) / 2;
        if scaffold > m {
            break;
        }
        let x = m - scaffold;
        if 8 * x < lo8 {
            break;
        }
        if 8 * x <= hi8 && x <= a * r {
            let mut part_sizes = vec![a, r - j];
            part_sizes.extend(std::iter::repeat_n(1, j));
            return Ok(SplitConstruction {
                kind: SplitKind::KPartiteMid,
                n,
                m,
                k: Some(j + 2),
                free_edges: x,
                free_slots: a * r,
                scaffold_edges: scaffold,
                part_sizes,
                rounded: n % 2 == 1,
                base: None,
            });
        }
    }
    Err(GenerateError::NoFeasibleK { n, m })
}

/// The low-density construction for `m`: bipartite when `8m <= n²`, otherwise
/// k-partite, falling back to the other form when the preferred one is infeasible.
pub fn plan_low(n: usize, m: usize) -> Result<SplitConstruction, GenerateError> {
    if 8 * m <= n * n {
        plan_bipartite(n, m).or_else(|e| plan_kpartite(n, m).map_err(|_| e))
    } else {
        plan_kpartite(n, m).or_else(|e| plan_bipartite(n, m).map_err(|_| e))
    }
}

/// Complement form: the complement of the low-density construction with
/// `C(n,2) - m` edges. Requires `m > C(n,2)/2`.
pub fn plan_complement_high(n: usize, m: usize) -> Result<SplitConstruction, GenerateError> {
    let total = pair_count(n);
    if 2 * m <= total {
        return Err(GenerateError::NotHighDensity { m, half: total as f64 / 2.0 });
    }
    if m > total {
        return Err(GenerateError::TooManyEdges { m, max: total });
    }
    let base = plan_low(n, total - m)?;
    Ok(SplitConstruction {
        kind: SplitKind::ComplementHigh,
        n,
        m,
        k: base.k,
        free_edges: base.free_edges,
        free_slots: base.free_slots,
        scaffold_edges: total - base.scaffold_edges - base.free_slots,
        part_sizes: base.part_sizes.clone(),
        rounded: base.rounded,
        base: Some(Box::new(base)),
    })
}

/// The construction used for `(n, m)` at any density.
pub fn plan_for(n: usize, m: usize) -> Result<SplitConstruction, GenerateError> {
    if 2 * m > pair_count(n) {
        plan_complement_high(n, m)
    } else {
        plan_low(n, m)
    }
}

/// Chooses `k` distinct indices of `0..len` uniformly by a partial Fisher–Yates shuffle.
fn choose_indices<R: Rng + ?Sized>(rng: &mut R, len: usize, k: usize) -> Vec<usize> {
    let mut slots: Vec<usize> = (0..len).collect();
    for i in 0..k {
        let j = rng.gen_range(i..len);
        slots.swap(i, j);
    }
    slots.truncate(k);
    slots
}

impl SplitConstruction {
    /// Draws one graph uniformly from the family.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph, GenerateError> {
        if let Some(base) = &self.base {
            return Ok(base.sample(rng)?.complement());
        }
        let n = self.n;
        let a = self.part_sizes[0];
        let r = n - a;
        let mut b = GraphBuilder::new(n)?;
        // parts after V_1: V_2 = a..a+|V_2|, singletons after it
        let mut parts: Vec<VertexSet> = Vec::new();
        let mut start = a;
        for &size in &self.part_sizes[1..] {
            parts.push((start..start + size).collect());
            start += size;
        }
        if self.kind == SplitKind::KPartiteMid {
            for (i, p) in parts.iter().enumerate() {
                for q in &parts[i + 1..] {
                    for u in *p {
                        for v in *q {
                            b.add_edge(u, v)?;
                        }
                    }
                }
            }
        }
        for slot in choose_indices(rng, self.free_slots, self.free_edges) {
            b.add_edge(slot / r, a + slot % r)?;
        }
        debug_assert_eq!(b.edge_count(), self.m);
        Ok(b.build())
    }

    /// `log2` of the number of distinct graphs the construction emits.
    pub fn log2_family_size(&self) -> f64 {
        log2_binomial(self.free_slots as u64, self.free_edges as u64).expect("free edges fit their slots")
    }
}

pub fn bipartite_split_sample(n: usize, m: usize, seed: u64) -> Result<Graph, GenerateError> {
    plan_bipartite(n, m)?.sample(&mut substream(seed, 0))
}

pub fn kpartite_split_sample(n: usize, m: usize, seed: u64) -> Result<Graph, GenerateError> {
    plan_kpartite(n, m)?.sample(&mut substream(seed, 0))
}

pub fn complement_high_sample(n: usize, m: usize, seed: u64) -> Result<Graph, GenerateError> {
    plan_complement_high(n, m)?.sample(&mut substream(seed, 0))
}

/// Uniform graph on `[n]` with exactly `m` edges.
pub fn gnm_sample_with<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph, GenerateError> {
    let total = pair_count(n);
    if m > total {
        return Err(GenerateError::TooManyEdges { m, max: total });
    }
    let mut b = GraphBuilder::new(n)?;
    for rank in choose_indices(rng, total, m) {
        let (i, j) = edge_unrank(n, rank)?;
        b.add_edge(i, j)?;
    }
    Ok(b.build())
}

pub fn gnm_sample(n: usize, m: usize, seed: u64) -> Result<Graph, GenerateError> {
    gnm_sample_with(n, m, &mut substream(seed, 0))
}

/// Binomial random graph: each pair is an edge independently with probability `p`.
pub fn gnp_sample_with<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph, GenerateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenerateError::BadProbability(p));
    }
    let mut b = GraphBuilder::new(n)?;
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                b.add_edge(i, j)?;
            }
        }
    }
    Ok(b.build())
}

pub fn gnp_sample(n: usize, p: f64, seed: u64) -> Result<Graph, GenerateError> {
    gnp_sample_with(n, p, &mut substream(seed, 0))
}

/// Exact `log2` of the size of the family [`plan_for`] samples from.
pub fn split_family_log_count(n: usize, m: usize) -> Result<f64, GenerateError> {
    Ok(plan_for(n, m)?.log2_family_size())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::h_exponent;
    use crate::recognizers::{is_generalised_split, is_induced_c5_free, is_perfect};

    #[test]
    fn bipartite_examples() {
        let g = bipartite_split_sample(4, 4, 99).unwrap();
        let mut k22 = GraphBuilder::new(4).unwrap();
        for (u, v) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            k22.add_edge(u, v).unwrap();
        }
        assert_eq!(g, k22.build());
        assert_eq!(bipartite_split_sample(6, 0, 1).unwrap(), Graph::empty(6).unwrap());
        assert!(bipartite_split_sample(6, 10, 1).is_err());
        let odd = plan_bipartite(7, 3).unwrap();
        assert!(odd.rounded);
        assert_eq!(odd.part_sizes, vec![4, 3]);
    }

    #[test]
    fn bipartite_samples_are_split() {
        for seed in 0..2000 {
            let g = bipartite_split_sample(8, 8, seed).unwrap();
            assert_eq!(g.edge_count(), 8);
            assert!(is_generalised_split(&g).unwrap());
            assert!(is_induced_c5_free(&g));
        }
    }

    #[test]
    fn kpartite_window_example() {
        // n = 16, m = 48: scan k = 2, 3, ... for x in [16, 48]
        let p = plan_kpartite(16, 48).unwrap();
        let mut expect = None;
        for k in 2..=9usize {
            let j = k - 2;
            let x = 48 - (j * (8 - j) + j * j.saturating_sub(1) / 2) as i64;
            if (16..=48).contains(&x) {
                expect = Some((k, x as usize));
                break;
            }
        }
        assert_eq!((p.k.unwrap(), p.free_edges), expect.unwrap());
        let q = plan_kpartite(16, 60).unwrap();
        assert_eq!(q.k, Some(4));
        assert_eq!(q.free_edges, 47);
        assert!(plan_kpartite(16, 5).is_err());
    }

    #[test]
    fn kpartite_edge_counts_and_split() {
        let mut rng = substream(2024, 0);
        let mut done = 0;
        while done < 1000 {
            let n = rng.gen_range(12..=20);
            let m = rng.gen_range(n * n / 8 + 1..=n * n / 4 + n);
            let Ok(plan) = plan_kpartite(n, m) else { continue };
            let g = plan.sample(&mut substream(done as u64, 3)).unwrap();
            assert_eq!(g.edge_count(), m);
            assert!(is_generalised_split(&g).unwrap());
            done += 1;
        }
    }

    #[test]
    fn complement_high_examples() {
        assert_eq!(complement_high_sample(6, 15, 4).unwrap(), Graph::complete(6).unwrap());
        assert!(complement_high_sample(6, 7, 4).is_err());
        for seed in 0..300 {
            let n = 10 + (seed as usize % 11);
            let total = pair_count(n);
            let m = total / 2 + 1 + (seed as usize * 7) % (total / 2 - 1);
            let g = complement_high_sample(n, m, seed).unwrap();
            assert_eq!(g.edge_count(), m);
            assert!(is_generalised_split(&g).unwrap());
            assert!(is_perfect(&g).unwrap());
        }
    }

    #[test]
    fn gnm_examples() {
        assert_eq!(gnm_sample(5, 10, 3).unwrap(), Graph::complete(5).unwrap());
        assert_eq!(gnm_sample(5, 0, 3).unwrap(), Graph::empty(5).unwrap());
        assert!(gnm_sample(5, 11, 3).is_err());
        assert_eq!(gnm_sample(20, 77, 5).unwrap(), gnm_sample(20, 77, 5).unwrap());
        assert_ne!(gnm_sample(20, 77, 5).unwrap(), gnm_sample(20, 77, 6).unwrap());
    }

    #[test]
    fn gnp_extremes() {
        assert_eq!(gnp_sample(7, 1.0, 2).unwrap(), Graph::complete(7).unwrap());
        assert_eq!(gnp_sample(7, 0.0, 2).unwrap(), Graph::empty(7).unwrap());
        assert!(gnp_sample(7, 1.5, 2).is_err());
        let g = gnp_sample(120, 0.5, 9).unwrap();
        let m = g.edge_count() as f64;
        assert!((m - 3570.0).abs() < 5.0 * (7140.0f64 * 0.25).sqrt());
    }

    #[test]
    fn family_counts() {
        let v = split_family_log_count(8, 8).unwrap();
        assert!((v - 12870f64.log2()).abs() < 1e-12);
        assert_eq!(split_family_log_count(8, 0).unwrap(), 0.0);
        // m = round(0.125 * 780) with ties to even
        let m = (0.125f64 * 780.0).round_ties_even() as usize;
        let norm = split_family_log_count(40, m).unwrap() / 780.0;
        assert!(norm <= h_exponent(0.125).unwrap() + 0.1);
    }
}
