//! Finite-`n` bounds and numeric checks of the prime-sum and prime-count
//! estimates.
//!
//! The counting upper bound: write each chain element as `a = q·P(a)`. The
//! cofactors `q` strictly increase along a chain and the primes `P(a)` are
//! distinct, and `q > √(2n / ln n)` together with `P(a) > √(n ln n / 2)`
//! would force `a > n`. Hence
//! `g(n) ≤ ⌊√(2n / ln n)⌋ + π(⌊√(n ln n / 2)⌋)` at every `n ≥ 3`.

use alloc::vec::Vec;

use crate::chains::{exact_g_at, exact_g_with, ExactOptions};
use crate::construct::{
    best_construction_with, construction_table_limit, default_bounds, geometric_bounds,
};
use crate::numeric::{
    floor_sqrt_half_n_log_n, floor_sqrt_n_log_n, floor_sqrt_two_n_over_log_n, ln, sqrt_n_over_log_n,
};
use crate::sieve::{for_each_prime, PrimeTable, MAX_N};
use crate::{Error, Result};

/// Lower and upper end of the window `[2, 2√2]` for `lim g(n)/√(n/ln n)`.
pub const C_WINDOW: (f64, f64) = (2.0, 2.0 * core::f64::consts::SQRT_2);

fn check_upper_n(n: u64) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidArgument("upper bound requires n >= 3"));
    }
    if n > MAX_N {
        return Err(Error::OutOfDomain { n, max: MAX_N });
    }
    Ok(())
}

/// The two thresholds `(⌊√(2n / ln n)⌋, ⌊√(n ln n / 2)⌋)`.
pub fn upper_bound_thresholds(n: u64) -> (u64, u64) {
    (floor_sqrt_two_n_over_log_n(n), floor_sqrt_half_n_log_n(n))
}

/// `⌊√(2n / ln n)⌋ + π(⌊√(n ln n / 2)⌋)`.
pub fn upper_bound(n: u64) -> Result<u64> {
    check_upper_n(n)?;
    let table = PrimeTable::new(floor_sqrt_half_n_log_n(n))?;
    upper_bound_with(&table, n)
}

pub fn upper_bound_with(table: &PrimeTable, n: u64) -> Result<u64> {
    check_upper_n(n)?;
    let (q_cap, p_cap) = upper_bound_thresholds(n);
    Ok(q_cap + table.prime_count(p_cap)? as u64)
}

/// Exact `Σ_{p ≤ x} p`.
pub fn prime_sum(x: u64) -> Result<u128> {
    let mut sum = 0u128;
    let mut overflow = false;
    for_each_prime(x, |p| match sum.checked_add(p as u128) {
        Some(s) => sum = s,
        None => overflow = true,
    });
    if overflow {
        Err(Error::Overflow)
    } else {
        Ok(sum)
    }
}

/// `(π(x), Σ_{p ≤ x} p)` at each of the ascending `xs`, from one sieve
/// pass up to the largest.
pub fn prime_stats_at(xs: &[u64]) -> Result<Vec<(u64, u128)>> {
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be ascending"));
    }
    let Some(&max) = xs.last() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(xs.len());
    let (mut count, mut sum) = (0u64, 0u128);
    let mut overflow = false;
    for_each_prime(max, |p| {
        while out.len() < xs.len() && xs[out.len()] < p {
            out.push((count, sum));
        }
        count += 1;
        match sum.checked_add(p as u128) {
            Some(s) => sum = s,
            None => overflow = true,
        }
    });
    if overflow {
        return Err(Error::Overflow);
    }
    out.resize(xs.len(), (count, sum));
    Ok(out)
}

/// Exact prime sum against `x²/(2 ln x) + x²/(4 ln² x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionReport {
    pub x: u64,
    pub exact_sum: u128,
    pub term1: f64,
    pub term2: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// `abs_err · ln³x / x²`, bounded if the remainder is `O(x² / ln³ x)`.
    pub err_over_x2_log3: f64,
}

pub fn prime_sum_expansion(x: u64) -> Result<ExpansionReport> {
    if x < 3 {
        return Err(Error::InvalidArgument("expansion requires x >= 3"));
    }
    let exact_sum = prime_sum(x)?;
    Ok(expansion_from_sum(x, exact_sum))
}

/// Builds the report for a known exact sum.
pub fn expansion_from_sum(x: u64, exact_sum: u128) -> ExpansionReport {
    let xf = x as f64;
    let l = ln(xf);
    let x2 = xf * xf;
    let term1 = x2 / (2.0 * l);
    let term2 = x2 / (4.0 * l * l);
    let exact = exact_sum as f64;
    let abs_err = (exact - term1 - term2).abs();
    ExpansionReport {
        x,
        exact_sum,
        term1,
        term2,
        abs_err,
        rel_err: abs_err / exact,
        err_over_x2_log3: abs_err * l * l * l / x2,
    }
}

/// `(x / ln x)(1 + 1 / ln x)`.
pub fn pi_estimate(x: f64) -> f64 {
    let l = ln(x);
    x / l * (1.0 + 1.0 / l)
}

/// Exact `π(x)` against [`pi_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiReport {
    pub x: u64,
    pub pi: u64,
    pub estimate: f64,
    /// `(π(x) − estimate) · ln³x / x`, the empirical size of the
    /// `O(1)/ln²x` correction.
    pub residual: f64,
}

pub fn pi_report(x: u64) -> Result<PiReport> {
    if x < 3 {
        return Err(Error::InvalidArgument("pi estimate requires x >= 3"));
    }
    let mut pi = 0u64;
    for_each_prime(x, |_| pi += 1);
    Ok(pi_report_from_count(x, pi))
}

pub fn pi_report_from_count(x: u64, pi: u64) -> PiReport {
    let xf = x as f64;
    let l = ln(xf);
    let estimate = pi_estimate(xf);
    PiReport {
        x,
        pi,
        estimate,
        residual: (pi as f64 - estimate) * l * l * l / xf,
    }
}

/// Whether all primes up to `√(n ln n)` sum to less than `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumBoundCheck {
    pub n: u64,
    /// `⌊√(n ln n)⌋`.
    pub x: u64,
    pub sum: u128,
    pub holds: bool,
    /// `(n − sum) / n`; negative when the check fails.
    pub margin: f64,
}

pub fn sum_bound_check(n: u64) -> Result<SumBoundCheck> {
    check_upper_n(n)?;
    let x = floor_sqrt_n_log_n(n);
    let sum = prime_sum(x)?;
    Ok(SumBoundCheck {
        n,
        x,
        sum,
        holds: sum < n as u128,
        margin: (n as f64 - sum as f64) / n as f64,
    })
}

/// Start bounds tried by [`best_construction_with`] for each row.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundsSweep {
    /// [`default_bounds`] with this many points.
    Auto { count: usize },
    /// `count` geometric points over `[lo, hi]`, clamped to `[2, n]`.
    Geometric { lo: f64, hi: f64, count: usize },
}

impl BoundsSweep {
    pub fn bounds_for(&self, n: u64) -> Vec<f64> {
        match *self {
            BoundsSweep::Auto { count } => default_bounds(n, count),
            BoundsSweep::Geometric { lo, hi, count } => geometric_bounds(lo, hi, count)
                .into_iter()
                .map(|b| b.clamp(2.0, n as f64))
                .collect(),
        }
    }
}

impl Default for BoundsSweep {
    fn default() -> Self {
        BoundsSweep::Auto { count: 24 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    /// Rows with `n ≤ exact_cap` get an exact `g(n)`.
    pub exact_cap: u64,
    pub sweep: BoundsSweep,
    pub exact: ExactOptions,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            exact_cap: 10_000_000,
            sweep: BoundsSweep::default(),
            exact: ExactOptions::default(),
        }
    }
}

/// One scan row: the sandwich `lower_len ≤ g(n) ≤ upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub n: u64,
    pub g_exact: Option<u64>,
    pub lower_len: u64,
    pub upper: u64,
    /// `g_exact` (or `lower_len`) divided by `√(n / ln n)`.
    pub ratio: f64,
    pub sqrt_n_over_log_n: f64,
    pub error: Option<Error>,
}

impl BoundsRow {
    fn failed(n: u64, error: Error) -> Self {
        BoundsRow {
            n,
            g_exact: None,
            lower_len: 0,
            upper: 0,
            ratio: 0.0,
            sqrt_n_over_log_n: 0.0,
            error: Some(error),
        }
    }

    pub fn sandwich_holds(&self) -> bool {
        self.error.is_none()
            && match self.g_exact {
                Some(g) => self.lower_len <= g && g <= self.upper,
                None => self.lower_len <= self.upper,
            }
    }

    /// Ratio inside `[2, 2√2]`.
    pub fn in_c_window(&self) -> bool {
        (C_WINDOW.0..=C_WINDOW.1).contains(&self.ratio)
    }
}

/// Everything in a row except the exact `g(n)`.
pub fn bounds_row_without_exact(n: u64, cfg: &ScanConfig) -> BoundsRow {
    match try_row(n, cfg, None) {
        Ok(row) => row,
        Err(e) => BoundsRow::failed(n, e),
    }
}

/// Fills in a row; `exact` supplies `g(n)` when the caller computed it
/// separately.
pub fn bounds_row_with(n: u64, cfg: &ScanConfig, exact: Option<u64>) -> BoundsRow {
    match try_row(n, cfg, exact) {
        Ok(row) => row,
        Err(e) => BoundsRow::failed(n, e),
    }
}

pub fn bounds_row(n: u64, cfg: &ScanConfig) -> BoundsRow {
    let exact = if n <= cfg.exact_cap {
        match exact_g_with(n, false, &cfg.exact) {
            Ok(r) => Some(r.g),
            Err(e) => return BoundsRow::failed(n, e),
        }
    } else {
        None
    };
    bounds_row_with(n, cfg, exact)
}

fn try_row(n: u64, cfg: &ScanConfig, g_exact: Option<u64>) -> Result<BoundsRow> {
    check_upper_n(n)?;
    let bounds = cfg.sweep.bounds_for(n);
    let limit = construction_table_limit(n, &bounds).max(floor_sqrt_half_n_log_n(n));
    let table = PrimeTable::with_budget(limit, cfg.exact.budget)?;
    let upper = upper_bound_with(&table, n)?;
    let lower_len = if bounds.is_empty() {
        crate::construct::paper_greedy_with(&table, n)
            .map(|t| t.chain.len())
            .unwrap_or(0)
    } else {
        best_construction_with(&table, n, &bounds)?.chain.len()
    } as u64;
    let scale = sqrt_n_over_log_n(n);
    Ok(BoundsRow {
        n,
        g_exact,
        lower_len,
        upper,
        ratio: g_exact.unwrap_or(lower_len) as f64 / scale,
        sqrt_n_over_log_n: scale,
        error: None,
    })
}

/// One [`BoundsRow`] per `n`; `ns` must be nonempty and strictly ascending.
pub fn scan(ns: &[u64], cfg: &ScanConfig) -> Result<Vec<BoundsRow>> {
    check_scan_ns(ns)?;
    let exact_ns: Vec<u64> = ns.iter().copied().filter(|&n| n <= cfg.exact_cap).collect();
    let exact = exact_g_at(&exact_ns, &cfg.exact)?;
    Ok(assemble_rows(ns, &exact, |n, g| bounds_row_with(n, cfg, g)))
}

/// Pairs each `n` with its exact value (the first `exact.len()` of `ns`
/// have one) and maps through `row`.
pub fn assemble_rows<F>(ns: &[u64], exact: &[u64], row: F) -> Vec<BoundsRow>
where
    F: Fn(u64, Option<u64>) -> BoundsRow,
{
    ns.iter()
        .enumerate()
        .map(|(i, &n)| row(n, exact.get(i).copied()))
        .collect()
}

pub fn check_scan_ns(ns: &[u64]) -> Result<()> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("scan requires at least one n"));
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "scan values must be strictly ascending",
        ));
    }
    Ok(())
}
