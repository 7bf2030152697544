//! Largest-prime-factor chains.
//!
//! For `n ≥ 1`, `g(n)` is the length of the longest sequence
//! `0 < a_1 < a_2 < … < a_t ≤ n` whose largest prime factors strictly
//! decrease, `P(a_1) > P(a_2) > … > P(a_t)`. This crate computes `g(n)`
//! exactly with a segmented largest-prime-factor sieve feeding a patience
//! fold, builds explicit lower-bound chains, and evaluates the finite
//! counting upper bound together with the prime-sum and prime-count
//! estimates behind the `Θ(√(n / log n))` order of growth.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats, thread
//! pools and the command line live in the `lpfchains` companion crate.
//!
//! Supported domain: `n ≤ 10⁹` (see [`sieve::MAX_N`]).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod chains;
pub mod construct;
mod error;
pub mod numeric;
pub mod sieve;

pub use asymptotics::{
    pi_estimate, prime_sum, prime_sum_expansion, scan, sum_bound_check, upper_bound, BoundsRow,
    ExpansionReport, ScanConfig,
};
pub use chains::{
    exact_g, exact_g_oracle, strict_lds_length, validate_chain, Chain, ChainElement,
    ChainViolation, GResult,
};
pub use construct::{adaptive_greedy, best_construction, paper_greedy, GreedyTrace};
pub use error::{Error, Result};
pub use sieve::{lpf_stream, primes_up_to, LpfStream, MemoryBudget, PrimeTable};
