//! Prime tables and the segmented largest-prime-factor stream.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::{Error, Result};

/// Largest `n` the chain computations accept.
pub const MAX_N: u64 = 1_000_000_000;

/// Default number of integers per sieve segment.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 18;

/// Odd integers per segment when enumerating primes.
const PRIME_SEGMENT: usize = 1 << 16;

/// Upper bound on bytes a single table or buffer may allocate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget(u64);

impl MemoryBudget {
    pub const DEFAULT: MemoryBudget = MemoryBudget(1 << 30);

    pub const fn bytes(bytes: u64) -> Self {
        MemoryBudget(bytes)
    }

    pub const fn unlimited() -> Self {
        MemoryBudget(u64::MAX)
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    /// Fails with [`Error::Resource`] when `requested` exceeds the budget.
    pub fn check(self, requested: u64) -> Result<()> {
        if requested > self.0 {
            Err(Error::Resource {
                requested,
                budget: self.0,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Upper estimate of `π(x)`, `1.25506 x / ln x` (valid for `x > 1`).
pub fn pi_upper_estimate(x: u64) -> u64 {
    if x < 17 {
        return 6;
    }
    let xf = x as f64;
    (1.255_06 * xf / crate::numeric::ln(xf)) as u64 + 1
}

/// Plain sieve of Eratosthenes for small limits (base primes).
fn small_primes(limit: u64) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u32);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Calls `f` on every prime `≤ limit`, in ascending order, using an odd-only
/// segmented sieve. Working memory is `O(√limit)`.
pub fn for_each_prime<F: FnMut(u64)>(limit: u64, mut f: F) {
    if limit < 2 {
        return;
    }
    f(2);
    let base = small_primes(limit.isqrt());
    let mut marks = vec![false; PRIME_SEGMENT];
    // segment covers odd values low, low + 2, …
    let mut low = 3u64;
    while low <= limit {
        let count = (((limit - low) / 2 + 1) as usize).min(PRIME_SEGMENT);
        let high = low + 2 * (count as u64 - 1);
        let marks = &mut marks[..count];
        marks.fill(false);
        for &p in base.iter().skip(1) {
            let p = p as u64;
            if p * p > high {
                break;
            }
            let mut start = (p * p).max(low.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - low) / 2) as usize;
            while idx < count {
                marks[idx] = true;
                idx += p as usize;
            }
        }
        for (i, &m) in marks.iter().enumerate() {
            if !m {
                f(low + 2 * i as u64);
            }
        }
        low = high + 2;
    }
}

/// All primes up to a limit, with `π` and interval queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        Self::with_budget(limit, MemoryBudget::DEFAULT)
    }

    pub fn with_budget(limit: u64, budget: MemoryBudget) -> Result<Self> {
        if limit > u32::MAX as u64 {
            return Err(Error::OutOfDomain {
                n: limit,
                max: u32::MAX as u64,
            });
        }
        let estimate = pi_upper_estimate(limit);
        budget.check(4 * estimate + PRIME_SEGMENT as u64)?;
        let mut primes = Vec::with_capacity(estimate as usize);
        for_each_prime(limit, |p| primes.push(p as u32));
        primes.shrink_to_fit();
        Ok(PrimeTable { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// The primes `≤ limit`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `π(x)`; requires `x ≤ limit`.
    pub fn prime_count(&self, x: u64) -> Result<usize> {
        if x > self.limit {
            return Err(Error::OutOfRange {
                value: x,
                limit: self.limit,
            });
        }
        Ok(self.primes.partition_point(|&p| p as u64 <= x))
    }

    /// Primes strictly between `lo` and `hi`, in descending order.
    pub fn primes_in_interval(&self, lo: f64, hi: f64) -> Result<Vec<u64>> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidArgument("interval requires lo < hi"));
        }
        if hi > self.limit as f64 {
            return Err(Error::OutOfRange {
                value: libm::ceil(hi) as u64,
                limit: self.limit,
            });
        }
        let start = self.primes.partition_point(|&p| p as f64 <= lo);
        let end = self.primes.partition_point(|&p| (p as f64) < hi);
        Ok(self.primes[start..end.max(start)]
            .iter()
            .rev()
            .map(|&p| p as u64)
            .collect())
    }

    /// Index range of the primes `p` with `lo < p ≤ hi`.
    pub(crate) fn index_range(&self, lo: u64, hi: u64) -> Range<usize> {
        let start = self.primes.partition_point(|&p| p as u64 <= lo);
        let end = self.primes.partition_point(|&p| p as u64 <= hi);
        start..end.max(start)
    }
}

/// Table of the primes `≤ limit` under the default memory budget.
pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    PrimeTable::new(limit)
}

pub fn prime_count(table: &PrimeTable, x: u64) -> Result<usize> {
    table.prime_count(x)
}

pub fn primes_in_interval(table: &PrimeTable, lo: f64, hi: f64) -> Result<Vec<u64>> {
    table.primes_in_interval(lo, hi)
}

/// Largest-prime-factor sieve for `2..=n`, evaluated one segment at a time.
///
/// Holds only the primes `≤ √n`; segments are independent, so disjoint
/// ranges may be filled on different threads.
#[derive(Debug, Clone)]
pub struct LpfSieve {
    n: u64,
    base: Vec<u32>,
}

impl LpfSieve {
    pub fn new(n: u64) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::OutOfDomain { n, max: MAX_N });
        }
        Ok(LpfSieve {
            n,
            base: small_primes(n.isqrt()),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Segment ranges `[lo, hi)` covering `2..=n`.
    pub fn segments(&self, segment_size: usize) -> impl Iterator<Item = Range<u64>> + '_ {
        let step = segment_size.max(1) as u64;
        let end = self.n + 1;
        (2..end)
            .step_by(step as usize)
            .map(move |lo| lo..(lo + step).min(end))
    }

    /// Writes `P(m)` for `m` in `lo..lo + out.len()` into `out`.
    ///
    /// `scratch` must have the same length as `out`. Each base prime `p`
    /// overwrites `out` at its multiples in ascending `p` order, while
    /// `scratch` accumulates the `√n`-smooth part of `m`; the cofactor
    /// `m / scratch[m]` is then either 1 or the single prime factor above `√n`.
    pub fn fill_segment(&self, lo: u64, out: &mut [u32], scratch: &mut [u32]) {
        assert!(lo >= 2, "segments start at 2");
        assert_eq!(out.len(), scratch.len());
        let len = out.len();
        if len == 0 {
            return;
        }
        let last = lo + len as u64 - 1;
        assert!(last <= self.n, "segment exceeds n");
        out.fill(1);
        scratch.fill(1);
        for &p in &self.base {
            let p = p as u64;
            if p > last {
                break;
            }
            let mut first = lo.div_ceil(p) * p;
            let mut idx = (first - lo) as usize;
            while idx < len {
                out[idx] = p as u32;
                scratch[idx] *= p as u32;
                idx += p as usize;
            }
            let mut power = p * p;
            while power <= last {
                first = lo.div_ceil(power) * power;
                let mut idx = (first - lo) as usize;
                while idx < len {
                    scratch[idx] *= p as u32;
                    idx += power as usize;
                }
                power = match power.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
        for (i, (lpf, smooth)) in out.iter_mut().zip(scratch.iter()).enumerate() {
            let m = (lo + i as u64) as u32;
            let cofactor = m / *smooth;
            if cofactor > 1 {
                *lpf = cofactor;
            }
        }
    }
}

/// Ordered stream of `(m, P(m))` for `m = 2..=n`.
#[derive(Debug, Clone)]
pub struct LpfStream {
    sieve: LpfSieve,
    segment_size: usize,
    next_lo: u64,
    buf: Vec<u32>,
    scratch: Vec<u32>,
    buf_lo: u64,
    pos: usize,
}

impl LpfStream {
    pub fn new(n: u64, segment_size: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("lpf stream requires n >= 2"));
        }
        if segment_size == 0 {
            return Err(Error::InvalidArgument("segment size must be positive"));
        }
        let sieve = LpfSieve::new(n)?;
        let cap = segment_size.min((n - 1) as usize);
        Ok(LpfStream {
            sieve,
            segment_size,
            next_lo: 2,
            buf: Vec::with_capacity(cap),
            scratch: Vec::with_capacity(cap),
            buf_lo: 2,
            pos: 0,
        })
    }

    pub fn n(&self) -> u64 {
        self.sieve.n
    }

    /// Advances by one whole segment, returning its first `m` and the
    /// `P(m)` values. Mixing this with [`Iterator::next`] skips whatever
    /// remained of the current segment.
    pub fn next_segment(&mut self) -> Option<(u64, &[u32])> {
        let n = self.sieve.n;
        if self.next_lo > n {
            return None;
        }
        let lo = self.next_lo;
        let len = ((n - lo + 1) as usize).min(self.segment_size);
        self.buf.resize(len, 0);
        self.scratch.resize(len, 0);
        self.sieve
            .fill_segment(lo, &mut self.buf, &mut self.scratch);
        self.next_lo = lo + len as u64;
        self.buf_lo = lo;
        self.pos = len;
        Some((lo, &self.buf))
    }
}

impl Iterator for LpfStream {
    type Item = (u64, u64);

    fn next(&mut self) -> Option<(u64, u64)> {
        if self.pos >= self.buf.len() {
            self.next_segment()?;
            self.pos = 0;
        }
        let i = self.pos;
        self.pos += 1;
        Some((self.buf_lo + i as u64, self.buf[i] as u64))
    }
}

/// Stream of `(m, P(m))` for `m = 2..=n`, sieved `segment_size` at a time.
pub fn lpf_stream(n: u64, segment_size: usize) -> Result<LpfStream> {
    LpfStream::new(n, segment_size)
}
