//! Exact `g(n)` as a longest strictly decreasing subsequence of `P(2..=n)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::numeric::largest_prime_factor;
use crate::sieve::{LpfStream, MemoryBudget, DEFAULT_SEGMENT_SIZE, MAX_N};
use crate::{Error, Result};

/// Default cap on `n` for [`exact_g_oracle`].
pub const ORACLE_CAP: u64 = 50_000;

/// Default cap on `n` for witness reconstruction.
pub const WITNESS_CAP: u64 = 10_000_000;

/// One chain entry: an integer and its largest prime factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainElement {
    pub a: u64,
    pub p: u64,
}

impl ChainElement {
    pub const fn new(a: u64, p: u64) -> Self {
        ChainElement { a, p }
    }
}

/// A sequence `a_1 < … < a_t ≤ n` paired with claimed largest prime factors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Chain {
    pub n: u64,
    pub elements: Vec<ChainElement>,
}

impl Chain {
    pub fn new(n: u64, elements: Vec<ChainElement>) -> Self {
        Chain { n, elements }
    }

    pub fn empty(n: u64) -> Self {
        Chain {
            n,
            elements: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn validate(&self) -> core::result::Result<(), ChainViolation> {
        validate_chain(self)
    }
}

/// First broken chain invariant, with the offending index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainViolation {
    /// `a[index] ≤ a[index - 1]`.
    NotIncreasing { index: usize },
    /// `a[index]` is `< 2` or `> n`.
    OutOfBounds { index: usize, a: u64, n: u64 },
    /// `p[index]` is not the largest prime factor of `a[index]`.
    WrongLargestPrime {
        index: usize,
        a: u64,
        claimed: u64,
        actual: u64,
    },
    /// `p[index] ≥ p[index - 1]`.
    NotDecreasing { index: usize },
}

impl ChainViolation {
    pub fn index(&self) -> usize {
        match *self {
            ChainViolation::NotIncreasing { index }
            | ChainViolation::OutOfBounds { index, .. }
            | ChainViolation::WrongLargestPrime { index, .. }
            | ChainViolation::NotDecreasing { index } => index,
        }
    }
}

impl fmt::Display for ChainViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ChainViolation::NotIncreasing { index } => {
                write!(f, "element {index}: a is not strictly increasing")
            }
            ChainViolation::OutOfBounds { index, a, n } => {
                write!(f, "element {index}: a = {a} is outside [2, {n}]")
            }
            ChainViolation::WrongLargestPrime {
                index,
                a,
                claimed,
                actual,
            } => write!(f, "element {index}: P({a}) = {actual}, not {claimed}"),
            ChainViolation::NotDecreasing { index } => {
                write!(f, "element {index}: p is not strictly decreasing")
            }
        }
    }
}

impl core::error::Error for ChainViolation {}

/// Checks every [`Chain`] invariant in index order; `P(a)` is recomputed by
/// trial division.
pub fn validate_chain(chain: &Chain) -> core::result::Result<(), ChainViolation> {
    let mut prev: Option<ChainElement> = None;
    for (index, &e) in chain.elements.iter().enumerate() {
        if let Some(prev) = prev {
            if e.a <= prev.a {
                return Err(ChainViolation::NotIncreasing { index });
            }
        }
        if e.a < 2 || e.a > chain.n {
            return Err(ChainViolation::OutOfBounds {
                index,
                a: e.a,
                n: chain.n,
            });
        }
        let actual = largest_prime_factor(e.a).unwrap_or(0);
        if actual != e.p {
            return Err(ChainViolation::WrongLargestPrime {
                index,
                a: e.a,
                claimed: e.p,
                actual,
            });
        }
        if let Some(prev) = prev {
            if e.p >= prev.p {
                return Err(ChainViolation::NotDecreasing { index });
            }
        }
        prev = Some(e);
    }
    Ok(())
}

/// `g(n)` with an optional optimal chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GResult {
    pub n: u64,
    pub g: u64,
    pub witness: Option<Chain>,
}

/// Length of the longest strictly decreasing subsequence of `values`.
pub fn strict_lds_length(values: &[u64]) -> usize {
    let mut tails: Vec<u64> = Vec::new();
    for &v in values {
        let k = tails.partition_point(|&t| t > v);
        if k == tails.len() {
            tails.push(v);
        } else {
            tails[k] = v;
        }
    }
    tails.len()
}

const NO_PRED: u32 = u32::MAX;

/// Patience fold over `(m, P(m))` pairs in ascending `m`.
///
/// `tails[k]` is the largest final value over strictly decreasing
/// subsequences of length `k + 1`, so `tails` itself strictly decreases and
/// its length is `g` of the last `m` pushed. An incoming value replaces the
/// leftmost tail `≤` it; equal values therefore never extend a chain.
#[derive(Debug, Clone, Default)]
pub struct LdsFold {
    tails: Vec<u32>,
    // witness tracking: m of each tail, and predecessor m for each m ≥ 2
    tail_at: Vec<u32>,
    pred: Option<Vec<u32>>,
    next_m: u64,
}

impl LdsFold {
    /// Length-only fold: `O(g)` memory.
    pub fn new() -> Self {
        LdsFold {
            next_m: 2,
            ..Default::default()
        }
    }

    /// Fold that records predecessors for `m ≤ n`: `O(n)` memory.
    pub fn with_witness(n: u64) -> Self {
        LdsFold {
            pred: Some(Vec::with_capacity(n.saturating_sub(1) as usize)),
            next_m: 2,
            ..Default::default()
        }
    }

    /// Current `g`, the longest chain among the values pushed so far.
    pub fn len(&self) -> usize {
        self.tails.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tails.is_empty()
    }

    #[inline]
    pub fn push(&mut self, lpf: u32) -> usize {
        let k = self.tails.partition_point(|&t| t > lpf);
        if k == self.tails.len() {
            self.tails.push(lpf);
        } else {
            self.tails[k] = lpf;
        }
        if let Some(pred) = &mut self.pred {
            let m = self.next_m as u32;
            pred.push(if k == 0 { NO_PRED } else { self.tail_at[k - 1] });
            if k == self.tail_at.len() {
                self.tail_at.push(m);
            } else {
                self.tail_at[k] = m;
            }
        }
        self.next_m += 1;
        self.tails.len()
    }

    /// Pushes a whole segment of `P(m)` values starting at `start`, which
    /// must be the next `m` the fold expects.
    pub fn push_segment(&mut self, start: u64, lpf: &[u32]) {
        assert_eq!(
            start, self.next_m,
            "segments must arrive in ascending order"
        );
        if self.pred.is_none() {
            for &p in lpf {
                let k = self.tails.partition_point(|&t| t > p);
                if k == self.tails.len() {
                    self.tails.push(p);
                } else {
                    self.tails[k] = p;
                }
            }
            self.next_m += lpf.len() as u64;
        } else {
            for &p in lpf {
                self.push(p);
            }
        }
    }

    /// The optimal chain, when predecessors were recorded.
    pub fn witness(&self, n: u64) -> Option<Chain> {
        let pred = self.pred.as_ref()?;
        let mut elements = Vec::with_capacity(self.tails.len());
        let mut cur = self.tail_at.last().copied().unwrap_or(NO_PRED);
        while cur != NO_PRED {
            let a = cur as u64;
            let p = largest_prime_factor(a).expect("chain elements are >= 2");
            elements.push(ChainElement { a, p });
            cur = pred[(a - 2) as usize];
        }
        elements.reverse();
        Some(Chain { n, elements })
    }

    pub fn finish(self, n: u64) -> GResult {
        let witness = self.witness(n);
        GResult {
            n,
            g: self.tails.len() as u64,
            witness,
        }
    }
}

/// Tuning for [`exact_g_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactOptions {
    pub segment_size: usize,
    pub witness_cap: u64,
    pub budget: MemoryBudget,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            segment_size: DEFAULT_SEGMENT_SIZE,
            witness_cap: WITNESS_CAP,
            budget: MemoryBudget::DEFAULT,
        }
    }
}

impl ExactOptions {
    /// Validates `n` and the witness request, returning the fold to use.
    pub fn fold_for(&self, n: u64, want_witness: bool) -> Result<LdsFold> {
        if n > MAX_N {
            return Err(Error::OutOfDomain { n, max: MAX_N });
        }
        if self.segment_size == 0 {
            return Err(Error::InvalidArgument("segment size must be positive"));
        }
        // two u32 buffers per segment
        let buffers = 8 * (self.segment_size as u64).min(n.max(1));
        self.budget.check(buffers)?;
        if !want_witness {
            return Ok(LdsFold::new());
        }
        if n > self.witness_cap {
            return Err(Error::CapExceeded {
                what: "witness",
                n,
                cap: self.witness_cap,
            });
        }
        self.budget.check(buffers + 4 * n)?;
        Ok(LdsFold::with_witness(n))
    }
}

/// Exact `g(n)`, streaming the sieve through the patience fold.
pub fn exact_g(n: u64, want_witness: bool) -> Result<GResult> {
    exact_g_with(n, want_witness, &ExactOptions::default())
}

pub fn exact_g_with(n: u64, want_witness: bool, opts: &ExactOptions) -> Result<GResult> {
    let mut fold = opts.fold_for(n, want_witness)?;
    if n >= 2 {
        let mut stream = LpfStream::new(n, opts.segment_size)?;
        while let Some((lo, lpf)) = stream.next_segment() {
            fold.push_segment(lo, lpf);
        }
    }
    Ok(fold.finish(n))
}

/// Pushes `lpf` (starting at `start`) into `fold`, recording `fold.len()`
/// whenever the fold reaches one of the ascending `checkpoints`.
/// `next` indexes the first checkpoint not yet recorded.
pub fn push_with_checkpoints(
    fold: &mut LdsFold,
    start: u64,
    lpf: &[u32],
    checkpoints: &[u64],
    next: &mut usize,
    out: &mut Vec<u64>,
) {
    let end = start + lpf.len() as u64;
    let mut lo = start;
    while *next < checkpoints.len() && checkpoints[*next] < end {
        let cp = checkpoints[*next];
        if cp >= lo {
            let upto = (cp + 1 - start) as usize;
            fold.push_segment(lo, &lpf[(lo - start) as usize..upto]);
            lo = cp + 1;
        }
        out.push(fold.len() as u64);
        *next += 1;
    }
    if lo < end {
        fold.push_segment(lo, &lpf[(lo - start) as usize..]);
    }
}

/// `g(n)` for each of the strictly ascending `ns`, from one streaming pass
/// up to the largest.
pub fn exact_g_at(ns: &[u64], opts: &ExactOptions) -> Result<Vec<u64>> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "checkpoints must be strictly ascending",
        ));
    }
    let Some(&max) = ns.last() else {
        return Ok(Vec::new());
    };
    let mut fold = opts.fold_for(max, false)?;
    let mut out = Vec::with_capacity(ns.len());
    // g(0) = g(1) = 0
    let mut next = ns.iter().take_while(|&&n| n < 2).count();
    out.resize(next, 0);
    if max >= 2 {
        let mut stream = LpfStream::new(max, opts.segment_size)?;
        while let Some((lo, lpf)) = stream.next_segment() {
            push_with_checkpoints(&mut fold, lo, lpf, ns, &mut next, &mut out);
        }
    }
    Ok(out)
}

/// `g(k)` for every `k` in `0..=n` from one streaming pass.
pub fn exact_g_prefix(n: u64) -> Result<Vec<u32>> {
    if n > MAX_N {
        return Err(Error::OutOfDomain { n, max: MAX_N });
    }
    MemoryBudget::DEFAULT.check(4 * (n + 1))?;
    let mut out = vec![0u32; 2.min(n as usize + 1)];
    if n >= 2 {
        out.reserve((n - 1) as usize);
        let mut fold = LdsFold::new();
        let mut stream = LpfStream::new(n, DEFAULT_SEGMENT_SIZE)?;
        while let Some((_, lpf)) = stream.next_segment() {
            for &p in lpf {
                out.push(fold.push(p) as u32);
            }
        }
    }
    Ok(out)
}

/// Quadratic DP over trial-division `P(2..=n)`: `best[i]` is the longest
/// chain ending at `m = i + 2`.
fn oracle_table(n: u64) -> (Vec<u64>, Vec<u32>, Vec<u32>) {
    let lpf: Vec<u64> = (2..=n)
        .map(|m| largest_prime_factor(m).expect("m >= 2"))
        .collect();
    let mut best = vec![0u32; lpf.len()];
    let mut prev = vec![NO_PRED; lpf.len()];
    for i in 0..lpf.len() {
        let (mut b, mut arg) = (0u32, NO_PRED);
        for j in 0..i {
            if lpf[j] > lpf[i] && best[j] > b {
                b = best[j];
                arg = j as u32;
            }
        }
        best[i] = b + 1;
        prev[i] = arg;
    }
    (lpf, best, prev)
}

/// Independent `O(n²)` evaluation of `g(n)` with a witness, for `n ≤ cap`.
pub fn exact_g_oracle_with_cap(n: u64, cap: u64) -> Result<GResult> {
    if n > cap {
        return Err(Error::CapExceeded {
            what: "oracle",
            n,
            cap,
        });
    }
    if n < 2 {
        return Ok(GResult {
            n,
            g: 0,
            witness: Some(Chain::empty(n)),
        });
    }
    let (lpf, best, prev) = oracle_table(n);
    let (mut end, mut g) = (0usize, 0u32);
    for (i, &b) in best.iter().enumerate() {
        if b > g {
            g = b;
            end = i;
        }
    }
    let mut elements = Vec::with_capacity(g as usize);
    let mut cur = end as u32;
    while cur != NO_PRED {
        let i = cur as usize;
        elements.push(ChainElement {
            a: i as u64 + 2,
            p: lpf[i],
        });
        cur = prev[i];
    }
    elements.reverse();
    Ok(GResult {
        n,
        g: g as u64,
        witness: Some(Chain { n, elements }),
    })
}

pub fn exact_g_oracle(n: u64) -> Result<GResult> {
    exact_g_oracle_with_cap(n, ORACLE_CAP)
}

/// Oracle `g(k)` for every `k` in `0..=n` from a single quadratic DP.
pub fn oracle_g_prefix(n: u64, cap: u64) -> Result<Vec<u32>> {
    if n > cap {
        return Err(Error::CapExceeded {
            what: "oracle",
            n,
            cap,
        });
    }
    let mut out = vec![0u32; 2.min(n as usize + 1)];
    if n >= 2 {
        let (_, best, _) = oracle_table(n);
        let mut running = 0;
        for b in best {
            running = running.max(b);
            out.push(running);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    /// Longest valid chain by enumerating every subset of `2..=n`.
    fn exhaustive_g(n: u64) -> u64 {
        let items: Vec<u64> = (2..=n).map(|m| largest_prime_factor(m).unwrap()).collect();
        let mut best = 0;
        for mask in 0u32..(1 << items.len()) {
            let mut last: Option<u64> = None;
            let mut ok = true;
            for (i, &p) in items.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    if last.is_some_and(|l| p >= l) {
                        ok = false;
                        break;
                    }
                    last = Some(p);
                }
            }
            if ok {
                best = best.max(mask.count_ones() as u64);
            }
        }
        best
    }

    #[test]
    fn exhaustive_agrees_for_tiny_n() {
        for n in 1..=16 {
            assert_eq!(exact_g(n, false).unwrap().g, exhaustive_g(n), "n={n}");
        }
        assert_eq!(exhaustive_g(4), 2);
        assert_eq!(exhaustive_g(10), 3);
    }

    #[test]
    fn exact_g_examples() {
        assert_eq!(exact_g(1, false).unwrap().g, 0);
        assert_eq!(exact_g(2, false).unwrap().g, 1);
        let r = exact_g(4, true).unwrap();
        assert_eq!(r.g, 2);
        assert_eq!(r.witness.as_ref().unwrap().len(), 2);
        validate_chain(r.witness.as_ref().unwrap()).unwrap();
        let r = exact_g(10, true).unwrap();
        assert_eq!(r.g, 3);
        let w = r.witness.unwrap();
        validate_chain(&w).unwrap();
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(exact_g_oracle(2).unwrap().g, 1);
        assert_eq!(exact_g_oracle(3).unwrap().g, 1);
        assert_eq!(exact_g_oracle(10).unwrap().g, 3);
        assert!(matches!(
            exact_g_oracle(ORACLE_CAP + 1),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn lds_examples() {
        assert_eq!(strict_lds_length(&[]), 0);
        assert_eq!(strict_lds_length(&[5, 3, 2]), 3);
        assert_eq!(strict_lds_length(&[2, 3, 2, 5, 3, 7, 2, 3, 5]), 3);
        assert_eq!(strict_lds_length(&[4, 4, 4]), 1);
        assert_eq!(strict_lds_length(&[5, 5, 3, 3, 2]), 3);
    }

    #[test]
    fn validate_examples() {
        let paper = Chain::new(
            100,
            [(19, 19), (34, 17), (39, 13), (44, 11)]
                .map(|(a, p)| ChainElement::new(a, p))
                .to_vec(),
        );
        assert_eq!(validate_chain(&paper), Ok(()));

        let swapped = Chain::new(
            10,
            alloc::vec![ChainElement::new(4, 2), ChainElement::new(3, 3)],
        );
        assert_eq!(
            validate_chain(&swapped),
            Err(ChainViolation::NotIncreasing { index: 1 })
        );

        let wrong = Chain::new(10, alloc::vec![ChainElement::new(6, 2)]);
        assert_eq!(
            validate_chain(&wrong),
            Err(ChainViolation::WrongLargestPrime {
                index: 0,
                a: 6,
                claimed: 2,
                actual: 3
            })
        );

        let flat = Chain::new(
            10,
            alloc::vec![ChainElement::new(2, 2), ChainElement::new(4, 2)],
        );
        assert_eq!(
            validate_chain(&flat),
            Err(ChainViolation::NotDecreasing { index: 1 })
        );

        let big = Chain::new(10, alloc::vec![ChainElement::new(11, 11)]);
        assert!(matches!(
            validate_chain(&big),
            Err(ChainViolation::OutOfBounds { index: 0, .. })
        ));
        let one = Chain::new(10, alloc::vec![ChainElement::new(1, 1)]);
        assert!(matches!(
            validate_chain(&one),
            Err(ChainViolation::OutOfBounds { index: 0, .. })
        ));
    }

    #[test]
    fn witness_cap_enforced() {
        let opts = ExactOptions {
            witness_cap: 100,
            ..Default::default()
        };
        assert!(matches!(
            exact_g_with(101, true, &opts),
            Err(Error::CapExceeded { .. })
        ));
        assert_eq!(
            exact_g_with(101, false, &opts).unwrap().g,
            exact_g(101, false).unwrap().g
        );
    }

    #[test]
    fn prefix_matches_individual_runs() {
        let prefix = exact_g_prefix(500).unwrap();
        assert_eq!(prefix.len(), 501);
        for n in [0u64, 1, 2, 3, 10, 77, 500] {
            assert_eq!(prefix[n as usize] as u64, exact_g(n, false).unwrap().g);
        }
        assert_eq!(oracle_g_prefix(500, ORACLE_CAP).unwrap(), prefix);
    }

    #[test]
    fn checkpoints_match_prefix() {
        let prefix = exact_g_prefix(3000).unwrap();
        let ns = [0u64, 1, 2, 3, 64, 65, 66, 1000, 2047, 2999, 3000];
        let opts = ExactOptions {
            segment_size: 64,
            ..Default::default()
        };
        let got = exact_g_at(&ns, &opts).unwrap();
        let want: Vec<u64> = ns.iter().map(|&n| prefix[n as usize] as u64).collect();
        assert_eq!(got, want);
        assert!(exact_g_at(&[5, 5], &opts).is_err());
        assert!(exact_g_at(&[], &opts).unwrap().is_empty());
    }
}
