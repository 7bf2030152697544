//! Standard-library companion to `lpfchains-core`: CSV/JSON file formats,
//! thread-pool drivers for the segmented sieve and scans, and the
//! `lpfchains` command line.

pub mod cli;
mod error;
pub mod format;
pub mod parallel;

pub use error::CliError;
