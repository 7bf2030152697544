//! Exact-decision helpers for the real-valued thresholds `√n`, `√(n log n)`,
//! `√(2n / log n)` and `√(n log n / 2)`.
//!
//! Every threshold reduces to a sign test of `a − b·ln n` for integers `a`,
//! `b`, `n`. Double precision decides almost every case; a double-double
//! evaluation of `ln n` takes over when the two sides are within a guard
//! band. Since `ln n` is irrational for `n ≥ 2`, the sign is never zero
//! unless `b = 0` or `n = 1`.

use core::cmp::Ordering;

/// Natural logarithm.
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// `√(n / ln n)`, the normalising scale of `g(n)`. Requires `n ≥ 2`.
pub fn sqrt_n_over_log_n(n: u64) -> f64 {
    let x = n as f64;
    sqrt(x / ln(x))
}

/// Relative width of the guard band around the double-precision decision.
const GUARD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl DoubleDouble {
    const LN2: DoubleDouble = DoubleDouble {
        hi: core::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };

    fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    fn from_u128(x: u128) -> Self {
        let hi = x as f64;
        let lo = (x as i128 - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    fn mul(self, o: Self) -> Self {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        DoubleDouble { hi, lo }
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Self::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Self::from_f64(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }.add(Self::from_f64(q3))
    }

    fn scale(self, k: i32) -> Self {
        let f = libm::ldexp(1.0, k);
        DoubleDouble {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    fn signum(self) -> Ordering {
        let v = if self.hi != 0.0 { self.hi } else { self.lo };
        v.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
}

/// `ln n` to roughly 100 bits.
fn ln_dd(n: u64) -> DoubleDouble {
    if n <= 1 {
        return DoubleDouble::from_f64(0.0);
    }
    // n = 2^k · m with m in [1/√2, √2)
    let mut k = 63 - n.leading_zeros() as i32;
    let mut m = DoubleDouble::from_u128(n as u128).scale(-k);
    if m.hi > core::f64::consts::SQRT_2 {
        m = m.scale(-1);
        k += 1;
    }
    let one = DoubleDouble::from_f64(1.0);
    // ln m = 2 atanh(s), s = (m - 1)/(m + 1), |s| < 0.172
    let s = m.sub(one).div(m.add(one));
    let s2 = s.mul(s);
    let mut power = s;
    let mut sum = s;
    for j in 1..40 {
        power = power.mul(s2);
        let term = power.div(DoubleDouble::from_f64((2 * j + 1) as f64));
        sum = sum.add(term);
        if libm::fabs(term.hi) < 1e-34 {
            break;
        }
    }
    let ln_m = sum.scale(1);
    DoubleDouble::LN2
        .mul(DoubleDouble::from_f64(k as f64))
        .add(ln_m)
}

/// Sign of `a − b·ln n`.
pub fn cmp_with_ln(a: u128, b: u64, n: u64) -> Ordering {
    if b == 0 || n <= 1 {
        return a.cmp(&0);
    }
    let lhs = a as f64;
    let rhs = b as f64 * ln(n as f64);
    let tol = GUARD * lhs.abs().max(rhs.abs());
    if lhs < rhs - tol {
        return Ordering::Less;
    }
    if lhs > rhs + tol {
        return Ordering::Greater;
    }
    let exact = DoubleDouble::from_u128(a).sub(DoubleDouble::from_u128(b as u128).mul(ln_dd(n)));
    exact.signum()
}

/// Largest `k ≥ 0` with `fits(k)`, for a predicate that is true on `0..=K`
/// and false above. `approx` is a floating estimate of `K`.
pub fn largest_satisfying(approx: f64, fits: impl Fn(u64) -> bool) -> u64 {
    let mut k = if approx.is_finite() && approx > 0.0 {
        approx as u64
    } else {
        0
    };
    while k > 0 && !fits(k) {
        k -= 1;
    }
    while fits(k + 1) {
        k += 1;
    }
    k
}

/// `⌊√(n ln n)⌋`.
pub fn floor_sqrt_n_log_n(n: u64) -> u64 {
    let approx = sqrt(n as f64 * ln(n as f64));
    largest_satisfying(approx, |k| {
        cmp_with_ln((k as u128) * (k as u128), n, n) != Ordering::Greater
    })
}

/// `⌊√(n ln n / 2)⌋`.
pub fn floor_sqrt_half_n_log_n(n: u64) -> u64 {
    let approx = sqrt(n as f64 * ln(n as f64) / 2.0);
    largest_satisfying(approx, |k| {
        cmp_with_ln(2 * (k as u128) * (k as u128), n, n) != Ordering::Greater
    })
}

/// `⌊√(2n / ln n)⌋` for `n ≥ 2`.
pub fn floor_sqrt_two_n_over_log_n(n: u64) -> u64 {
    let approx = sqrt(2.0 * n as f64 / ln(n as f64));
    // k² ≤ 2n / ln n  ⟺  2n − k²·ln n ≥ 0
    largest_satisfying(approx, |k| {
        let k2 = k.saturating_mul(k);
        cmp_with_ln(2 * n as u128, k2, n) != Ordering::Less
    })
}

/// Strictly inside `(√n, √(n ln n))`: `p² > n` and `p² < n ln n`.
pub fn in_greedy_interval(p: u64, n: u64) -> bool {
    let p2 = (p as u128) * (p as u128);
    p2 > n as u128 && cmp_with_ln(p2, n, n) == Ordering::Less
}

/// Largest prime factor by trial division; `None` for `m < 2`.
pub fn largest_prime_factor(mut m: u64) -> Option<u64> {
    if m < 2 {
        return None;
    }
    let mut largest = 1;
    while m % 2 == 0 {
        largest = 2;
        m /= 2;
    }
    let mut d = 3u64;
    while d * d <= m {
        while m % d == 0 {
            largest = d;
            m /= d;
        }
        d += 2;
    }
    if m > 1 {
        largest = m;
    }
    Some(largest)
}

/// Primality by trial division.
pub fn is_prime(m: u64) -> bool {
    largest_prime_factor(m) == Some(m)
}
