//! Closed-form exponents: binary entropy `H`, the split exponent `h`, the
//! dangerous-pair rate `r`, the weak-subgraph exponent, and exact log-binomials.
//!
//! Everything is in bits. `h` and `r` are only defined on the open interval
//! `(0, 1)` and reject its endpoints.

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Up to this `m`, [`log2_binomial`] evaluates `C(m, k)` as an exact big integer;
/// above it, a log-gamma expression is used.
pub const EXACT_BINOMIAL_LIMIT: u64 = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("{what} must lie in {domain}, got {value}")]
    OutOfDomain { what: &'static str, domain: &'static str, value: f64 },
    #[error("k = {k} exceeds m = {m}")]
    KExceedsM { m: u64, k: u64 },
    #[error("c * m is not an integer (m = {m}, c = {c})")]
    NonIntegral { m: u64, c: String },
    #[error("chromatic number must be at least 3, got {0}")]
    ChromaticTooSmall(u32),
    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
}

fn open_unit(what: &'static str, c: f64) -> Result<(), EntropyError> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(EntropyError::OutOfDomain { what, domain: "(0, 1)", value: c })
    }
}

/// `H(x) = -x log2 x - (1-x) log2 (1-x)`, with `H(0) = H(1) = 0`.
pub fn binary_entropy(x: f64) -> Result<f64, EntropyError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(EntropyError::OutOfDomain { what: "x", domain: "[0, 1]", value: x });
    }
    Ok(entropy_unchecked(x))
}

#[inline]
fn entropy_unchecked(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// The limiting exponent of the induced-C5-free, perfect and generalised
/// split classes at density `c`:
/// `H(2c)/2` below 1/4, `1/2` on `[1/4, 3/4]`, `H(2c-1)/2` above 3/4.
pub fn h_exponent(c: f64) -> Result<f64, EntropyError> {
    open_unit("c", c)?;
    Ok(if c < 0.25 {
        entropy_unchecked(2.0 * c) / 2.0
    } else if c <= 0.75 {
        0.5
    } else {
        entropy_unchecked(2.0 * c - 1.0) / 2.0
    })
}

#[inline]
fn big_r(x: f64) -> f64 {
    (x * (1.0 - x)).powi(4)
}

/// The dangerous-pair rate `r(c) = R(2c)/72`, `(1/4)^4/72`, `R(2c-1)/72` on the
/// three ranges, with `R(x) = x^4 (1-x)^4`.
pub fn r_rate(c: f64) -> Result<f64, EntropyError> {
    open_unit("c", c)?;
    let inner = if c < 0.25 {
        big_r(2.0 * c)
    } else if c <= 0.75 {
        0.25f64.powi(4)
    } else {
        big_r(2.0 * c - 1.0)
    };
    Ok(inner / 72.0)
}

/// [`r_rate`] in exact rational arithmetic.
pub fn r_rate_exact(c: &BigRational) -> Result<BigRational, EntropyError> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if *c <= zero || *c >= one {
        return Err(EntropyError::OutOfDomain { what: "c", domain: "(0, 1)", value: c.to_f64().unwrap_or(f64::NAN) });
    }
    let quarter = BigRational::new(1.into(), 4.into());
    let two = BigRational::from_integer(2.into());
    let r = |x: BigRational| {
        let y = &x * (&one - &x);
        let y2 = &y * &y;
        &y2 * &y2
    };
    let inner = if *c < quarter {
        r(&two * c)
    } else if *c <= BigRational::new(3.into(), 4.into()) {
        let q2 = &quarter * &quarter;
        &q2 * &q2
    } else {
        r(&two * c - &one)
    };
    Ok(inner / BigRational::from_integer(72.into()))
}

/// `h(c) - r(c)`, the exponent left after dangerous pairs are accounted for.
pub fn h_minus_r(c: f64) -> Result<f64, EntropyError> {
    Ok(h_exponent(c)? - r_rate(c)?)
}

/// Which closed form produced an [`ExponentReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "formula")]
pub enum Formula {
    BinaryEntropy,
    SplitExponent,
    DangerousRate,
    /// The weak-subgraph exponent for chromatic number `chromatic`;
    /// `saturated` marks densities at or above `(r-2)/(r-1)`, where the value is 0.
    SubgraphExponent {
        chromatic: u32,
        saturated: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentReport {
    pub c: f64,
    pub value: f64,
    #[serde(flatten)]
    pub formula: Formula,
}

impl ExponentReport {
    pub fn entropy(c: f64) -> Result<Self, EntropyError> {
        Ok(ExponentReport { c, value: binary_entropy(c)?, formula: Formula::BinaryEntropy })
    }

    pub fn split(c: f64) -> Result<Self, EntropyError> {
        Ok(ExponentReport { c, value: h_exponent(c)?, formula: Formula::SplitExponent })
    }

    pub fn dangerous_rate(c: f64) -> Result<Self, EntropyError> {
        Ok(ExponentReport { c, value: r_rate(c)?, formula: Formula::DangerousRate })
    }
}

/// Exponent of the number of graphs of density `c` with no weak copy of a
/// graph of chromatic number `r`: `(r-2)/(r-1) * H((r-1)/(r-2) * c)`.
///
/// For `c >= (r-2)/(r-1)` the limit is 0; that case returns 0 with
/// `saturated = true`.
pub fn subgraph_exponent(r: u32, c: f64) -> Result<ExponentReport, EntropyError> {
    if r < 3 {
        return Err(EntropyError::ChromaticTooSmall(r));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(EntropyError::OutOfDomain { what: "c", domain: "(0, 1)", value: c });
    }
    let ratio = (r as f64 - 2.0) / (r as f64 - 1.0);
    let saturated = c >= ratio;
    let value = if saturated { 0.0 } else { ratio * entropy_unchecked((c / ratio).min(1.0)) };
    Ok(ExponentReport { c, value, formula: Formula::SubgraphExponent { chromatic: r, saturated } })
}

/// Exact `C(m, k)`.
pub fn binomial(m: u64, k: u64) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= m - k + i;
        acc /= i;
    }
    acc
}

/// `log2 x` for a positive big integer, accurate to about one part in `2^52`.
pub fn log2_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero(), "log2 of zero");
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

/// `log2 C(m, k)`: exact big-integer evaluation for `m <= EXACT_BINOMIAL_LIMIT`,
/// log-gamma beyond.
pub fn log2_binomial(m: u64, k: u64) -> Result<f64, EntropyError> {
    if k > m {
        return Err(EntropyError::KExceedsM { m, k });
    }
    if k == 0 || k == m {
        return Ok(0.0);
    }
    if m <= EXACT_BINOMIAL_LIMIT {
        Ok(log2_biguint(&binomial(m, k)))
    } else {
        Ok(log2_binomial_lgamma(m, k))
    }
}

/// `log2 C(m, k)` through `ln Γ`. Used above the exact limit.
pub fn log2_binomial_lgamma(m: u64, k: u64) -> f64 {
    let lg = |x: u64| libm::lgamma(x as f64 + 1.0);
    (lg(m) - lg(k) - lg(m - k)) / std::f64::consts::LN_2
}

/// Exact test of `C(m,k) <= 2^{m H(k/m)}`, i.e.
/// `C(m,k) * k^k * (m-k)^(m-k) <= m^m`.
pub fn entropy_upper_bound_exact(m: u64, k: u64) -> bool {
    if k > m {
        return true;
    }
    let pow = |b: u64| BigUint::from(b).pow(b as u32);
    binomial(m, k) * pow(k) * pow(m - k) <= pow(m)
}

/// Runs [`entropy_upper_bound_exact`] for every `1 <= m <= max_m` and every
/// `k`, returning the violating `(m, k)` pairs. Rows are independent and run in
/// parallel; `k` and `m - k` give the same product, so half of each row is checked.
pub fn entropy_upper_bound_scan(max_m: u64) -> Vec<(u64, u64)> {
    let self_powers: Vec<BigUint> = (0..=max_m).map(|j| BigUint::from(j).pow(j as u32)).collect();
    let mut bad: Vec<(u64, u64)> = (1..=max_m)
        .into_par_iter()
        .flat_map_iter(|m| {
            let mut row = Vec::new();
            let mut binom = BigUint::one();
            for k in 0..=m / 2 {
                let lhs = &binom * &self_powers[k as usize] * &self_powers[(m - k) as usize];
                if lhs > self_powers[m as usize] {
                    row.push((m, k));
                    if k != m - k {
                        row.push((m, m - k));
                    }
                }
                binom = binom * (m - k) / (k + 1);
            }
            row
        })
        .collect();
    bad.sort_unstable();
    bad
}

/// Outcome of comparing `log2 C(m, cm)` with `m H(c)` and `m H(c) - γ m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub m: u64,
    pub k: u64,
    pub gamma: f64,
    pub log2_binomial: f64,
    /// `m H(c)`
    pub upper: f64,
    /// `m H(c) - γ m`
    pub lower: f64,
    /// `(m H(c) - log2 C(m, cm)) / m`
    pub deficit: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

/// Checks `2^{mH(c) - γm} <= C(m, cm) <= 2^{mH(c)}` for rational `c` with `cm`
/// integral. The upper side is checked in exact integer arithmetic when
/// `m <= EXACT_BINOMIAL_LIMIT`.
pub fn entropy_sandwich_check(m: u64, c: Ratio<u64>, gamma: f64) -> Result<SandwichReport, EntropyError> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(EntropyError::NonPositiveGamma(gamma));
    }
    if *c.numer() > *c.denom() {
        return Err(EntropyError::OutOfDomain { what: "c", domain: "[0, 1]", value: c.to_f64().unwrap_or(f64::NAN) });
    }
    let cm = c * Ratio::from_integer(m);
    if !cm.is_integer() {
        return Err(EntropyError::NonIntegral { m, c: c.to_string() });
    }
    let k = cm.to_integer();
    let lb = log2_binomial(m, k)?;
    let upper = m as f64 * entropy_unchecked(k as f64 / m.max(1) as f64);
    let lower = upper - gamma * m as f64;
    let upper_holds = if m <= EXACT_BINOMIAL_LIMIT { entropy_upper_bound_exact(m, k) } else { lb <= upper };
    let deficit = if m == 0 { 0.0 } else { (upper - lb) / m as f64 };
    Ok(SandwichReport { m, k, gamma, log2_binomial: lb, upper, lower, deficit, lower_holds: lower <= lb, upper_holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -0.2 log2 0.2 - 0.8 log2 0.8 = 0.7219280948873623...
        assert!((binary_entropy(0.2).unwrap() - 0.721_928_094_887_362_3).abs() < 1e-12);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn h_values() {
        assert_eq!(h_exponent(0.5).unwrap(), 0.5);
        assert_eq!(h_exponent(0.25).unwrap(), 0.5);
        assert_eq!(entropy_unchecked(0.5) / 2.0, 0.5);
        // H(0.2)/2
        assert!((h_exponent(0.1).unwrap() - 0.360_964_047_443_681_1).abs() < 1e-12);
        assert!(h_exponent(0.0).is_err());
        assert!(h_exponent(1.0).is_err());
    }

    #[test]
    fn r_values() {
        assert!((r_rate(0.5).unwrap() - 1.0 / 18432.0).abs() < 1e-18);
        let exact = r_rate_exact(&BigRational::new(1.into(), 2.into())).unwrap();
        assert_eq!(exact, BigRational::new(1.into(), 18432.into()));
        let expect = 0.2f64.powi(4) * 0.8f64.powi(4) / 72.0;
        assert!((r_rate(0.1).unwrap() - expect).abs() < 1e-18);
        for i in 1..1000 {
            let c = i as f64 / 1000.0;
            let a = r_rate(c).unwrap();
            let b = r_rate(1.0 - c).unwrap();
            assert!((a - b).abs() < 1e-15, "c = {c}");
            assert!(a > 0.0);
        }
        assert!(r_rate(0.0).is_err());
    }

    #[test]
    fn subgraph_exponent_values() {
        assert_eq!(subgraph_exponent(3, 0.25).unwrap().value, 0.5);
        assert!((subgraph_exponent(4, 1.0 / 3.0).unwrap().value - 2.0 / 3.0).abs() < 1e-12);
        let near = subgraph_exponent(3, 0.5 - 1e-9).unwrap();
        assert!(near.value < 1e-6);
        let sat = subgraph_exponent(3, 0.6).unwrap();
        assert_eq!(sat.value, 0.0);
        assert_eq!(sat.formula, Formula::SubgraphExponent { chromatic: 3, saturated: true });
        assert!(subgraph_exponent(2, 0.1).is_err());
        let mut prev = 0.0;
        for r in 3..=6 {
            let v = subgraph_exponent(r, 0.1).unwrap().value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn log2_binomial_values() {
        assert!((log2_binomial(10, 5).unwrap() - 252f64.log2()).abs() < 1e-12);
        assert_eq!(log2_binomial(10, 0).unwrap(), 0.0);
        assert_eq!(log2_binomial(7, 7).unwrap(), 0.0);
        assert!(log2_binomial(3, 4).is_err());
        let v = log2_binomial(1_000_000, 300_000).unwrap();
        let gap = 1e6 * binary_entropy(0.3).unwrap() - v;
        assert!(gap > 0.0 && gap < 30.0, "gap {gap}");
    }

    #[test]
    fn exact_and_lgamma_agree_at_the_seam() {
        for k in [1, 17, 2500, 5000, 9999] {
            let exact = log2_biguint(&binomial(EXACT_BINOMIAL_LIMIT, k));
            let approx = log2_binomial_lgamma(EXACT_BINOMIAL_LIMIT, k);
            assert!(((exact - approx) / exact).abs() < 1e-9, "k={k}: {exact} vs {approx}");
        }
        let below = log2_binomial(EXACT_BINOMIAL_LIMIT, 4000).unwrap();
        let above = log2_binomial(EXACT_BINOMIAL_LIMIT + 1, 4000).unwrap();
        assert!(above > below);
    }

    #[test]
    fn sandwich_examples() {
        let r = entropy_sandwich_check(10, Ratio::new(1, 2), 0.3).unwrap();
        assert!(r.holds());
        assert!((r.deficit - (10.0 - 252f64.log2()) / 10.0).abs() < 1e-12);
        assert!((r.deficit - 0.2023).abs() < 1e-4);
        let z = entropy_sandwich_check(37, Ratio::new(0, 1), 0.01).unwrap();
        assert!(z.holds());
        assert_eq!(z.deficit, 0.0);
        let big = entropy_sandwich_check(1_000_000, Ratio::new(3, 10), 0.01).unwrap();
        assert!(big.holds());
        assert!(big.deficit < 1e-4);
        let small = entropy_sandwich_check(1000, Ratio::new(3, 10), 0.01).unwrap();
        assert!(big.deficit < small.deficit);
        assert!(entropy_sandwich_check(10, Ratio::new(1, 3), 0.1).is_err());
        assert!(entropy_sandwich_check(10, Ratio::new(1, 2), 0.0).is_err());
    }

    #[test]
    fn exact_upper_bound_small_cases() {
        for m in 0..=60 {
            for k in 0..=m {
                assert!(entropy_upper_bound_exact(m, k), "m={m} k={k}");
            }
        }
        // equality at the ends
        assert_eq!(binomial(5, 0), BigUint::one());
    }
}
