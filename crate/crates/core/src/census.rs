//! Labeled census of m-edge graphs on `[n]`: exact enumeration, Monte Carlo
//! estimates, exponent curves, and the dangerous-pair pattern probability.
//!
//! The exact census walks the m-subsets of the `C(n,2)` edge slots in colex
//! order. Colex order on subsets is numeric order on their bitmasks, so the
//! walk is Gosper's successor on a `u64` mask; ranks are unranked only at
//! chunk boundaries. The graph is updated in place by toggling the slots that
//! changed between consecutive masks.

use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::entropy::{binomial, h_exponent, log2_biguint, EntropyError};
use crate::generators::{gnm_sample_with, GenerateError};
use crate::graph::{edge_unrank, pair_count, Graph, GraphError, VertexSet};
use crate::recognizers::{find_induced_c5, induces_cycle, perfect_obstruction, ClassPredicate, RecognizeError};
use crate::rng::substream;

/// Jobs with more edge subsets than this are refused unless forced.
pub const CENSUS_BUDGET: u64 = 10_000_000_000;

/// Largest `n` whose edge slots fit one `u64` mask.
pub const CENSUS_MAX_VERTICES: usize = 11;

/// Monte Carlo samples drawn per random stream.
pub const MC_BLOCK: u64 = 4096;

const TARGET_CHUNKS: u64 = 1024;
const WILSON_Z: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("census of {subsets} edge subsets exceeds the budget of {limit}; pass force to run anyway")]
    BudgetExceeded { subsets: BigUint, limit: u64 },
    #[error("exact census supports at most {CENSUS_MAX_VERTICES} vertices, got {0}")]
    TooManyVertices(usize),
    #[error("m = {m} exceeds the {slots} vertex pairs")]
    TooManyEdges { m: usize, slots: usize },
    #[error("Monte Carlo census needs at least one sample")]
    NoSamples,
    #[error("edge probability must lie strictly between 0 and 1, got {0}")]
    ProbabilityOutOfRange(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Generate(#[from] GenerateError),
}

fn as_decimal<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

/// Sample statistics of a Monte Carlo census.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
    pub fraction: f64,
    /// Wilson 95% interval for the fraction.
    pub ci_low: f64,
    pub ci_high: f64,
    /// Half-width of the interval scaled to a count.
    pub count_half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CensusMode {
    Exact,
    MonteCarlo(Estimate),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusResult {
    pub n: usize,
    pub m: usize,
    pub predicate: String,
    /// Exact count, or the rounded point estimate in Monte Carlo mode.
    #[serde(serialize_with = "as_decimal")]
    pub count: BigUint,
    #[serde(serialize_with = "as_decimal")]
    pub total: BigUint,
    /// `log2(count)`; negative infinity when nothing qualifies.
    pub log2_count: f64,
    /// `log2_count / C(n,2)`.
    pub exponent: f64,
    pub mode: CensusMode,
    pub wall_time_s: f64,
}

impl CensusResult {
    fn new(n: usize, m: usize, predicate: &ClassPredicate, count: BigUint, total: BigUint, mode: CensusMode, started: Instant) -> Self {
        let log2_count = if count.is_zero() { f64::NEG_INFINITY } else { log2_biguint(&count) };
        let slots = pair_count(n);
        let exponent = if slots == 0 { 0.0 } else { log2_count / slots as f64 };
        CensusResult {
            n,
            m,
            predicate: predicate.to_string(),
            count,
            total,
            log2_count,
            exponent,
            mode,
            wall_time_s: started.elapsed().as_secs_f64(),
        }
    }

    /// `count / total` as a float (the estimated fraction in Monte Carlo mode).
    pub fn fraction(&self) -> f64 {
        match &self.mode {
            CensusMode::MonteCarlo(e) => e.fraction,
            CensusMode::Exact => ratio_f64(&self.count, &self.total),
        }
    }
}

fn ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    BigRational::new(a.clone().into(), b.clone().into()).to_f64().unwrap_or(f64::NAN)
}

/// `m = round(c · C(n,2))`, ties to even.
pub fn edges_for_density(n: usize, c: f64) -> Result<usize, EntropyError> {
    if !(0.0..=1.0).contains(&c) {
        return Err(EntropyError::OutOfDomain { what: "density c", domain: "[0, 1]", value: c });
    }
    Ok((c * pair_count(n) as f64).round_ties_even() as usize)
}

/// Lowest m-bit mask of colex rank `rank`.
fn colex_unrank(mut rank: u64, m: usize, table: &[Vec<u64>]) -> u64 {
    let mut mask = 0u64;
    for i in (1..=m).rev() {
        // largest c with C(c, i) <= rank
        let mut c = i - 1;
        while table[c + 1][i] <= rank {
            c += 1;
        }
        mask |= 1 << c;
        rank -= table[c][i];
    }
    mask
}

/// Pascal's triangle up to row `rows`, saturating.
fn pascal(rows: usize) -> Vec<Vec<u64>> {
    let mut t = vec![vec![0u64; rows + 2]; rows + 2];
    for r in 0..rows + 2 {
        t[r][0] = 1;
        for k in 1..=r {
            t[r][k] = t[r - 1][k - 1].saturating_add(t[r - 1][k]);
        }
    }
    t
}

#[inline]
fn gosper_next(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

/// Predicate evaluation with a cached obstruction, re-checked before any search.
enum Evaluator<'a> {
    C5Free(Option<VertexSet>),
    Perfect(Option<(VertexSet, bool)>),
    Other(&'a ClassPredicate),
}

impl<'a> Evaluator<'a> {
    fn new(p: &'a ClassPredicate) -> Self {
        match p {
            ClassPredicate::InducedC5Free => Evaluator::C5Free(None),
            ClassPredicate::Perfect => Evaluator::Perfect(None),
            other => Evaluator::Other(other),
        }
    }

    fn holds(&mut self, g: &Graph) -> Result<bool, RecognizeError> {
        match self {
            Evaluator::C5Free(cache) => {
                if let Some(w) = cache {
                    if induces_cycle(g, *w) {
                        return Ok(false);
                    }
                }
                *cache = find_induced_c5(g).map(|c| c.into_iter().collect());
                Ok(cache.is_none())
            }
            Evaluator::Perfect(cache) => {
                if let Some((w, comp)) = *cache {
                    let still = if comp { induces_cycle(&g.complement(), w) } else { induces_cycle(g, w) };
                    if still {
                        return Ok(false);
                    }
                }
                *cache = perfect_obstruction(g)?.map(|h| (h.cycle.into_iter().collect(), h.in_complement));
                Ok(cache.is_none())
            }
            Evaluator::Other(p) => p.check(g),
        }
    }
}

/// Counts qualifying subsets among colex ranks `start..end`.
fn count_range(
    n: usize,
    m: usize,
    start: u64,
    end: u64,
    predicate: &ClassPredicate,
    table: &[Vec<u64>],
    slots: &[(usize, usize)],
) -> Result<u64, RecognizeError> {
    let mut mask = colex_unrank(start, m, table);
    let mut g = Graph::from_edge_mask(n, mask as u128).expect("mask within slots");
    let mut eval = Evaluator::new(predicate);
    let mut hits = 0u64;
    for rank in start..end {
        if eval.holds(&g)? {
            hits += 1;
        }
        if rank + 1 < end {
            let next = gosper_next(mask);
            let mut diff = mask ^ next;
            while diff != 0 {
                let s = diff.trailing_zeros() as usize;
                diff &= diff - 1;
                let (i, j) = slots[s];
                g.toggle_edge_unchecked(i, j);
            }
            mask = next;
        }
    }
    Ok(hits)
}

/// Exact number of labeled graphs on `[n]` with `m` edges satisfying `predicate`.
pub fn exact_census(n: usize, m: usize, predicate: &ClassPredicate, force: bool) -> Result<CensusResult, CensusError> {
    let started = Instant::now();
    if n > CENSUS_MAX_VERTICES {
        return Err(CensusError::TooManyVertices(n));
    }
    let slot_count = pair_count(n);
    if m > slot_count {
        return Err(CensusError::TooManyEdges { m, slots: slot_count });
    }
    let total = binomial(slot_count as u64, m as u64);
    if !force && total > BigUint::from(CENSUS_BUDGET) {
        return Err(CensusError::BudgetExceeded { subsets: total, limit: CENSUS_BUDGET });
    }
    if n > predicate.max_vertices() {
        return Err(RecognizeError::GraphTooLarge { what: "census predicate", n, limit: predicate.max_vertices() }.into());
    }
    if *predicate == ClassPredicate::AllGraphs {
        return Ok(CensusResult::new(n, m, predicate, total.clone(), total, CensusMode::Exact, started));
    }
    let subsets = total.to_u64().expect("C(55, m) fits in u64");
    let table = pascal(slot_count);
    let slots: Vec<(usize, usize)> = (0..slot_count).map(|r| edge_unrank(n, r)).collect::<Result<_, _>>()?;
    let chunk = subsets.div_ceil(TARGET_CHUNKS).max(1);
    let chunks: Vec<(u64, u64)> = (0..subsets).step_by(chunk as usize).map(|s| (s, (s + chunk).min(subsets))).collect();
    let partial: Vec<u64> =
        chunks.par_iter().map(|&(s, e)| count_range(n, m, s, e, predicate, &table, &slots)).collect::<Result<_, _>>()?;
    let count = partial.into_iter().fold(BigUint::zero(), |acc, c| acc + c);
    Ok(CensusResult::new(n, m, predicate, count, total, CensusMode::Exact, started))
}

/// Count of m-edge graphs on `[n]` with no weak copy of `f`.
pub fn subgraph_census(n: usize, m: usize, f: &Graph, force: bool) -> Result<CensusResult, CensusError> {
    exact_census(n, m, &ClassPredicate::no_subgraph(f.clone())?, force)
}

/// Wilson 95% interval for `hits` out of `samples`.
pub fn wilson_interval(hits: u64, samples: u64) -> (f64, f64) {
    let nn = samples as f64;
    let p = hits as f64 / nn;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / nn;
    let centre = (p + z2 / (2.0 * nn)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Fraction of `G(n, m)` samples in the class, scaled by the total.
///
/// Sample block `b` (of [`MC_BLOCK`] draws) uses stream `b` of `seed`, so the
/// estimate does not depend on the worker count.
pub fn monte_carlo_census(n: usize, m: usize, predicate: &ClassPredicate, samples: u64, seed: u64) -> Result<CensusResult, CensusError> {
    let started = Instant::now();
    if samples == 0 {
        return Err(CensusError::NoSamples);
    }
    let slot_count = pair_count(n);
    if m > slot_count {
        return Err(CensusError::TooManyEdges { m, slots: slot_count });
    }
    let total = binomial(slot_count as u64, m as u64);
    let hits = if *predicate == ClassPredicate::AllGraphs {
        samples
    } else {
        let blocks = samples.div_ceil(MC_BLOCK);
        let per_block: Vec<u64> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = substream(seed, b);
                let draws = MC_BLOCK.min(samples - b * MC_BLOCK);
                let mut hits = 0;
                for _ in 0..draws {
                    let g = gnm_sample_with(n, m, &mut rng)?;
                    if predicate.check(&g)? {
                        hits += 1;
                    }
                }
                Ok(hits)
            })
            .collect::<Result<_, CensusError>>()?;
        per_block.into_iter().sum()
    };
    let fraction = hits as f64 / samples as f64;
    let (ci_low, ci_high) = if *predicate == ClassPredicate::AllGraphs { (1.0, 1.0) } else { wilson_interval(hits, samples) };
    let total_f = total.to_f64().unwrap_or(f64::INFINITY);
    let count = BigUint::from((fraction * total_f).round() as u128);
    let count = if hits == samples { total.clone() } else { count };
    let estimate = Estimate { samples, seed, hits, fraction, ci_low, ci_high, count_half_width: (ci_high - ci_low) / 2.0 * total_f };
    Ok(CensusResult::new(n, m, predicate, count, total, CensusMode::MonteCarlo(estimate), started))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMode {
    Exact { force: bool },
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub c: f64,
    pub h: f64,
    pub result: CensusResult,
}

/// One census per `(n, c)`, with `m = round(c · C(n,2))` and the reference `h(c)`.
pub fn exponent_curve(ns: &[usize], cs: &[f64], predicate: &ClassPredicate, mode: CurveMode) -> Result<Vec<CurveRow>, CensusError> {
    let mut rows = Vec::with_capacity(ns.len() * cs.len());
    for &c in cs {
        let h = h_exponent(c)?;
        for &n in ns {
            let m = edges_for_density(n, c)?;
            let result = match mode {
                CurveMode::Exact { force } => exact_census(n, m, predicate, force)?,
                CurveMode::MonteCarlo { samples, seed } => monte_carlo_census(n, m, predicate, samples, seed)?,
            };
            rows.push(CurveRow { n, c, h, result });
        }
    }
    Ok(rows)
}

/// The two three-vertex graphs a dangerous pair is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PairKind {
    /// Path `0-1-2`.
    P3,
    /// Edge `0-1` plus the isolated vertex `2`.
    AntiP3,
}

impl PairKind {
    pub const ALL: [PairKind; 2] = [PairKind::P3, PairKind::AntiP3];

    fn edges(self) -> &'static [(usize, usize)] {
        match self {
            PairKind::P3 => &[(0, 1), (1, 2)],
            PairKind::AntiP3 => &[(0, 1)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DangerousPairResult {
    pub kind1: PairKind,
    pub kind2: PairKind,
    #[serde(serialize_with = "as_ratio")]
    pub p: BigRational,
    /// Probability that the six-vertex union contains an induced C5.
    #[serde(serialize_with = "as_ratio")]
    pub q_exact: BigRational,
    /// `p⁴(1-p)⁴`.
    #[serde(serialize_with = "as_ratio")]
    pub lower_bound: BigRational,
    /// Patterns containing an induced C5, indexed by their number of cross edges.
    pub patterns_by_edges: [u64; 10],
}

fn as_ratio<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Number of cross-edge patterns (of 512) with `k` edges whose union has an induced C5.
pub fn dangerous_pattern_counts(kind1: PairKind, kind2: PairKind) -> [u64; 10] {
    let mut counts = [0u64; 10];
    for pattern in 0u32..512 {
        let mut g = Graph::empty(6).expect("six vertices");
        for &(a, b) in kind1.edges() {
            g.toggle_edge_unchecked(a, b);
        }
        for &(a, b) in kind2.edges() {
            g.toggle_edge_unchecked(3 + a, 3 + b);
        }
        for bit in 0..9 {
            if pattern >> bit & 1 == 1 {
                g.toggle_edge_unchecked(bit / 3, 3 + bit % 3);
            }
        }
        if find_induced_c5(&g).is_some() {
            counts[pattern.count_ones() as usize] += 1;
        }
    }
    counts
}

fn pow(x: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * x)
}

/// Exact probability that independent `p`-random cross edges between the two
/// graphs create an induced C5.
pub fn dangerous_pair_probability(kind1: PairKind, kind2: PairKind, p: &BigRational) -> Result<DangerousPairResult, CensusError> {
    if *p <= BigRational::zero() || *p >= BigRational::one() {
        return Err(CensusError::ProbabilityOutOfRange(p.to_string()));
    }
    let counts = dangerous_pattern_counts(kind1, kind2);
    let q1 = BigRational::one() - p;
    let q_exact = counts
        .iter()
        .enumerate()
        .map(|(k, &a)| BigRational::from_integer(a.into()) * pow(p, k) * pow(&q1, 9 - k))
        .fold(BigRational::zero(), |acc, t| acc + t);
    Ok(DangerousPairResult { kind1, kind2, p: p.clone(), q_exact, lower_bound: pow(p, 4) * pow(&q1, 4), patterns_by_edges: counts })
}
