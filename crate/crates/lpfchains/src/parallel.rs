//! Thread-pool drivers.
//!
//! Sieve segments are filled concurrently in batches and handed to the
//! patience fold strictly in ascending order, so results never depend on
//! the thread count.

use lpfchains_core::asymptotics::{bounds_row_with, check_scan_ns, BoundsRow, ScanConfig};
use lpfchains_core::chains::{push_with_checkpoints, ExactOptions};
use lpfchains_core::sieve::LpfSieve;
use lpfchains_core::{GResult, Result};
use rayon::prelude::*;
use rayon::ThreadPool;

/// Pool with `threads` workers; 0 means one per available core.
pub fn thread_pool(threads: usize) -> std::result::Result<ThreadPool, rayon::ThreadPoolBuildError> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build()
}

/// Feeds every `(start, P(start..))` segment of `2..=n` to `f` in order.
pub fn for_each_segment<F>(n: u64, segment_size: usize, pool: &ThreadPool, mut f: F) -> Result<()>
where
    F: FnMut(u64, &[u32]),
{
    if n < 2 {
        return Ok(());
    }
    let sieve = LpfSieve::new(n)?;
    let ranges: Vec<_> = sieve.segments(segment_size).collect();
    let batch = 2 * pool.current_num_threads().max(1);
    for chunk in ranges.chunks(batch) {
        let filled: Vec<Vec<u32>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|r| {
                    let len = (r.end - r.start) as usize;
                    let mut out = vec![0u32; len];
                    let mut scratch = vec![0u32; len];
                    sieve.fill_segment(r.start, &mut out, &mut scratch);
                    out
                })
                .collect()
        });
        for (r, lpf) in chunk.iter().zip(&filled) {
            f(r.start, lpf);
        }
    }
    Ok(())
}

/// [`lpfchains_core::chains::exact_g_with`] with concurrent segment sieving.
pub fn exact_g_parallel(
    n: u64,
    want_witness: bool,
    opts: &ExactOptions,
    pool: &ThreadPool,
) -> Result<GResult> {
    let mut fold = opts.fold_for(n, want_witness)?;
    for_each_segment(n, opts.segment_size, pool, |lo, lpf| {
        fold.push_segment(lo, lpf)
    })?;
    Ok(fold.finish(n))
}

/// `g(n)` at each strictly ascending `n`, from one concurrent pass.
pub fn exact_g_at_parallel(ns: &[u64], opts: &ExactOptions, pool: &ThreadPool) -> Result<Vec<u64>> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(lpfchains_core::Error::InvalidArgument(
            "checkpoints must be strictly ascending",
        ));
    }
    let Some(&max) = ns.last() else {
        return Ok(Vec::new());
    };
    let mut fold = opts.fold_for(max, false)?;
    let mut next = ns.iter().take_while(|&&n| n < 2).count();
    let mut out = vec![0; next];
    for_each_segment(max, opts.segment_size, pool, |lo, lpf| {
        push_with_checkpoints(&mut fold, lo, lpf, ns, &mut next, &mut out)
    })?;
    Ok(out)
}

/// [`lpfchains_core::scan`] with the exact pass and the per-row
/// constructions spread over `pool`. Row order follows `ns`.
pub fn scan_parallel(ns: &[u64], cfg: &ScanConfig, pool: &ThreadPool) -> Result<Vec<BoundsRow>> {
    check_scan_ns(ns)?;
    let exact_ns: Vec<u64> = ns.iter().copied().filter(|&n| n <= cfg.exact_cap).collect();
    let exact = exact_g_at_parallel(&exact_ns, &cfg.exact, pool)?;
    let with_exact: Vec<(u64, Option<u64>)> = ns
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, exact.get(i).copied()))
        .collect();
    let rows: Vec<BoundsRow> = pool.install(|| {
        with_exact
            .par_iter()
            .map(|&(n, g)| bounds_row_with(n, cfg, g))
            .collect()
    });
    Ok(rows)
}
