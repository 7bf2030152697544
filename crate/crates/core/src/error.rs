use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the sieve, chain and bound computations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An allocation would exceed the configured [`MemoryBudget`](crate::MemoryBudget).
    Resource { requested: u64, budget: u64 },
    /// A query point lies above the limit of the table it was asked of.
    OutOfRange { value: u64, limit: u64 },
    /// `n` lies outside the supported domain.
    OutOfDomain { n: u64, max: u64 },
    /// An operation with an explicit cap (oracle, witness) was asked beyond it.
    CapExceeded {
        what: &'static str,
        n: u64,
        cap: u64,
    },
    /// No primes lie in the open interval `(√n, √(n log n))`.
    EmptyInterval { n: u64 },
    /// Exact accumulation overflowed.
    Overflow,
    /// A precondition on the arguments does not hold.
    InvalidArgument(&'static str),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Resource { .. } => "resource",
            Error::OutOfRange { .. } => "out_of_range",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::EmptyInterval { .. } => "empty_interval",
            Error::Overflow => "overflow",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Resource { requested, budget } => write!(
                f,
                "allocation of {requested} bytes exceeds the memory budget of {budget} bytes"
            ),
            Error::OutOfRange { value, limit } => {
                write!(f, "{value} exceeds the table limit {limit}")
            }
            Error::OutOfDomain { n, max } => {
                write!(f, "n = {n} is outside the supported domain n <= {max}")
            }
            Error::CapExceeded { what, n, cap } => {
                write!(f, "{what} requested for n = {n}, above its cap {cap}")
            }
            Error::EmptyInterval { n } => {
                write!(f, "no primes in (sqrt(n), sqrt(n log n)) for n = {n}")
            }
            Error::Overflow => f.write_str("exact accumulation overflowed"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
