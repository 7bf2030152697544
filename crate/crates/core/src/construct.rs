//! Explicit lower-bound chains.
//!
//! [`paper_greedy`] walks the primes of `(√n, √(n log n))` downward and
//! gives each the smallest multiple above the previous element. Because
//! every such prime exceeds `√n ≥ √a`, it is automatically the largest
//! prime factor of its multiple. [`adaptive_greedy`] relaxes the prime
//! range and skips primes that cannot be placed.

use alloc::vec::Vec;

use crate::chains::{Chain, ChainElement};
use crate::numeric::{floor_sqrt_n_log_n, in_greedy_interval, ln, sqrt};
use crate::sieve::{PrimeTable, MAX_N};
use crate::{Error, Result};

/// One constructed element `a = q·p` of the greedy chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyStep {
    pub p: u64,
    pub q: u64,
    pub a: u64,
    /// Sum of the primes used up to and including this step.
    pub partial_sum: u64,
    /// `a > n`.
    pub overshoot: bool,
}

/// Full record of the greedy construction for one `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyTrace {
    pub n: u64,
    /// Primes of `(√n, √(n log n))`, descending.
    pub primes_used: Vec<u64>,
    /// One step per prime, including any beyond `n`.
    pub steps: Vec<GreedyStep>,
    /// Maximal prefix of `steps` with `a ≤ n`.
    pub chain: Chain,
    /// Index of the first step with `a > n`.
    pub overshoot_index: Option<usize>,
}

impl GreedyTrace {
    pub fn partial_sums(&self) -> impl Iterator<Item = u64> + '_ {
        self.steps.iter().map(|s| s.partial_sum)
    }
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument("construction requires n >= 2"));
    }
    if n > MAX_N {
        return Err(Error::OutOfDomain { n, max: MAX_N });
    }
    Ok(())
}

/// Primes `p` with `√n < p < √(n ln n)`, descending, decided exactly.
pub fn greedy_primes(table: &PrimeTable, n: u64) -> Result<Vec<u64>> {
    let hi = floor_sqrt_n_log_n(n);
    if hi > table.limit() {
        return Err(Error::OutOfRange {
            value: hi,
            limit: table.limit(),
        });
    }
    let range = table.index_range(n.isqrt(), hi);
    Ok(table.primes()[range]
        .iter()
        .rev()
        .map(|&p| p as u64)
        .filter(|&p| in_greedy_interval(p, n))
        .collect())
}

/// Smallest table limit [`paper_greedy_with`] accepts for `n`.
pub fn greedy_table_limit(n: u64) -> u64 {
    floor_sqrt_n_log_n(n)
}

/// The greedy lower-bound construction for `n`.
pub fn paper_greedy(n: u64) -> Result<GreedyTrace> {
    check_n(n)?;
    let table = PrimeTable::new(greedy_table_limit(n))?;
    paper_greedy_with(&table, n)
}

/// [`paper_greedy`] against a caller-supplied table covering `⌊√(n ln n)⌋`.
pub fn paper_greedy_with(table: &PrimeTable, n: u64) -> Result<GreedyTrace> {
    check_n(n)?;
    let primes_used = greedy_primes(table, n)?;
    if primes_used.is_empty() {
        return Err(Error::EmptyInterval { n });
    }
    Ok(trace_from_primes(n, primes_used))
}

fn trace_from_primes(n: u64, primes_used: Vec<u64>) -> GreedyTrace {
    let mut steps = Vec::with_capacity(primes_used.len());
    let (mut prev, mut partial_sum) = (0u64, 0u64);
    for &p in &primes_used {
        // smallest q with q·p > prev; q = 1 for the first prime
        let q = prev / p + 1;
        let a = q * p;
        partial_sum += p;
        steps.push(GreedyStep {
            p,
            q,
            a,
            partial_sum,
            overshoot: a > n,
        });
        prev = a;
    }
    let overshoot_index = steps.iter().position(|s| s.overshoot);
    let valid = overshoot_index.unwrap_or(steps.len());
    let chain = Chain::new(
        n,
        steps[..valid]
            .iter()
            .map(|s| ChainElement::new(s.a, s.p))
            .collect(),
    );
    GreedyTrace {
        n,
        primes_used,
        steps,
        chain,
        overshoot_index,
    }
}

/// `q` has no prime factor above `p`. `table` must hold every prime `≤ p`.
fn is_smooth(mut q: u64, p: u64, table: &PrimeTable) -> bool {
    if q <= p {
        return true;
    }
    for &r in table.primes() {
        let r = r as u64;
        if r > p || r * r > q {
            break;
        }
        while q % r == 0 {
            q /= r;
        }
    }
    // q is now 1, a prime, or a product of primes > p
    q <= p
}

/// Greedy chain over all primes descending from the largest prime
/// `≤ start_bound`, skipping a prime when its smallest multiple above the
/// last element exceeds `n` or has a larger prime factor than itself.
pub fn adaptive_greedy(n: u64, start_bound: f64) -> Result<Chain> {
    check_n(n)?;
    let bound = clamp_bound(n, start_bound)?;
    let table = PrimeTable::new(bound)?;
    adaptive_greedy_with(&table, n, start_bound)
}

fn clamp_bound(n: u64, start_bound: f64) -> Result<u64> {
    if !(2.0..=n as f64).contains(&start_bound) {
        return Err(Error::InvalidArgument("start bound must lie in [2, n]"));
    }
    Ok(libm::floor(start_bound) as u64)
}

pub fn adaptive_greedy_with(table: &PrimeTable, n: u64, start_bound: f64) -> Result<Chain> {
    check_n(n)?;
    let bound = clamp_bound(n, start_bound)?;
    if bound > table.limit() {
        return Err(Error::OutOfRange {
            value: bound,
            limit: table.limit(),
        });
    }
    let range = table.index_range(0, bound);
    let mut elements = Vec::new();
    let mut last = 0u64;
    for &p in table.primes()[range].iter().rev() {
        let p = p as u64;
        let q = last / p + 1;
        let a = q * p;
        if a > n || !is_smooth(q, p, table) {
            continue;
        }
        elements.push(ChainElement::new(a, p));
        last = a;
    }
    Ok(Chain::new(n, elements))
}

/// Which constructor produced a [`Construction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstructionSource {
    PaperGreedy,
    Adaptive { start_bound: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub chain: Chain,
    pub source: ConstructionSource,
}

/// Start bounds spaced geometrically over `[0.75, 2]·√(n ln n)`, clamped
/// to `[2, n]`. Empirically the best bound sits near `1.3·√(n ln n)`.
pub fn default_bounds(n: u64, count: usize) -> Vec<f64> {
    if n < 2 || count == 0 {
        return Vec::new();
    }
    let x = n as f64;
    let centre = sqrt(x * ln(x));
    let lo = (0.75 * centre).clamp(2.0, x);
    let hi = (2.0 * centre).clamp(lo, x);
    geometric_bounds(lo, hi, count)
}

/// `count` values from `lo` to `hi` inclusive with a constant ratio.
pub fn geometric_bounds(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let ratio = libm::pow(hi / lo, 1.0 / (count - 1) as f64);
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        hi
                    } else {
                        lo * libm::pow(ratio, i as f64)
                    }
                })
                .collect()
        }
    }
}

/// Table limit needed by [`best_construction_with`].
pub fn construction_table_limit(n: u64, bounds: &[f64]) -> u64 {
    let max_bound = bounds
        .iter()
        .map(|&b| libm::floor(b.clamp(2.0, n as f64)) as u64)
        .max()
        .unwrap_or(0);
    greedy_table_limit(n).max(max_bound)
}

/// Longest chain among [`paper_greedy`] and [`adaptive_greedy`] at each
/// bound. Bounds are clamped to `[2, n]`. Ties go to the smaller start
/// bound, the paper greedy counting as starting at `√(n ln n)`.
pub fn best_construction(n: u64, bounds: &[f64]) -> Result<Construction> {
    check_n(n)?;
    let table = PrimeTable::new(construction_table_limit(n, bounds))?;
    best_construction_with(&table, n, bounds)
}

pub fn best_construction_with(table: &PrimeTable, n: u64, bounds: &[f64]) -> Result<Construction> {
    check_n(n)?;
    if bounds.is_empty() {
        return Err(Error::InvalidArgument("bounds must be nonempty"));
    }
    let greedy_bound = sqrt(n as f64 * ln(n as f64));
    let mut best = match paper_greedy_with(table, n) {
        Ok(trace) => (greedy_bound, trace.chain, ConstructionSource::PaperGreedy),
        Err(Error::EmptyInterval { .. }) => (
            greedy_bound,
            Chain::empty(n),
            ConstructionSource::PaperGreedy,
        ),
        Err(e) => return Err(e),
    };
    for &b in bounds.iter().filter(|b| !b.is_nan()) {
        let b = b.clamp(2.0, n as f64);
        let chain = adaptive_greedy_with(table, n, b)?;
        if chain.len() > best.1.len() || (chain.len() == best.1.len() && b < best.0) {
            best = (b, chain, ConstructionSource::Adaptive { start_bound: b });
        }
    }
    Ok(Construction {
        chain: best.1,
        source: best.2,
    })
}
