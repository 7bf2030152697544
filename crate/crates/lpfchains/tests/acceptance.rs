//! Acceptance suite. Runs without the libtest harness so that each
//! criterion prints exactly one PASS/FAIL line, even when everything passes.
//!
//! Tolerances are fixed constants below; none of them is adjusted at run
//! time.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lpfchains_core::asymptotics::{expansion_from_sum, prime_stats_at, upper_bound_with};
use lpfchains_core::chains::{exact_g_prefix, oracle_g_prefix};
use lpfchains_core::construct::{greedy_table_limit, paper_greedy_with, GreedyTrace};
use lpfchains_core::numeric::{floor_sqrt_half_n_log_n, sqrt_n_over_log_n};
use lpfchains_core::sieve::LpfStream;
use lpfchains_core::{exact_g, exact_g_oracle, validate_chain, Error, PrimeTable};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x6c70_6663_6861_696e;

// criterion 1
const ORACLE_DENSE_MAX: u64 = 2_000;
const ORACLE_RANDOM_COUNT: usize = 200;
const ORACLE_RANDOM_MAX: u64 = 50_000;
// criterion 2
const SANDWICH_MAX: u64 = 100_000;
// criterion 3
const LEMMA_MIN_POINTS: usize = 200;
const LEMMA_SAMPLES: usize = 300;
const LEMMA_MAX: u64 = 1_000_000;
// criterion 4
const PRIME_SUM_XS: [u64; 3] = [10_000, 100_000, 1_000_000];
const PRIME_SUM_REL_TOL: f64 = 0.01;
const PRIME_SUM_BAND: f64 = 4.0;
// criterion 5
const RATIO_FROM: u64 = 10_000;
const RATIO_MAX: u64 = 1_000_000;
const RATIO_BAND: (f64, f64) = (1.5, 3.5);
// criterion 6
const PERF_N: u64 = 10_000_000;
const PERF_TIME: Duration = Duration::from_secs(60);
const PERF_MEMORY_BYTES: u64 = 256 * 1024 * 1024;
const SEGMENT_N: u64 = 100_000;
const SEGMENT_SIZES: [usize; 4] = [1, 7, 64, 4096];
// criterion 7
const SCAN_ARGS: [&str; 4] = ["scan", "--range", "1e3:1e6", "--geometric"];
const THREAD_COUNTS: [&str; 4] = ["1", "2", "4", "0"];

const CHILD_ENV: &str = "LPFCHAINS_ACCEPTANCE_CHILD";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_oracle_equivalence() -> Outcome {
    for n in 1..=ORACLE_DENSE_MAX {
        let fast = exact_g(n, true).map_err(|e| e.to_string())?;
        let slow = exact_g_oracle(n).map_err(|e| e.to_string())?;
        ensure(fast.g == slow.g, || {
            format!("n = {n}: exact {} oracle {}", fast.g, slow.g)
        })?;
        let w = fast.witness.expect("witness requested");
        ensure(w.len() as u64 == fast.g, || {
            format!("n = {n}: witness length")
        })?;
        validate_chain(&w).map_err(|v| format!("n = {n}: witness {v}"))?;
    }

    let mut rng = StdRng::seed_from_u64(SEED);
    let mut ns: Vec<u64> = (0..ORACLE_RANDOM_COUNT)
        .map(|_| rng.random_range(1..=ORACLE_RANDOM_MAX))
        .collect();
    ns.sort_unstable();
    ns.dedup();
    let max = *ns.last().unwrap();
    // one quadratic pass yields the oracle value for every prefix
    let oracle = oracle_g_prefix(max, max).map_err(|e| e.to_string())?;
    for &n in &ns {
        let fast = exact_g(n, false).map_err(|e| e.to_string())?.g;
        ensure(fast == oracle[n as usize] as u64, || {
            format!("n = {n}: exact {fast} oracle {}", oracle[n as usize])
        })?;
    }
    Ok(format!(
        "all n in [1, {ORACLE_DENSE_MAX}] and {} random n <= {max} agree",
        ns.len()
    ))
}

fn greedy_len(table: &PrimeTable, n: u64) -> Result<usize, String> {
    match paper_greedy_with(table, n) {
        Ok(t) => Ok(t.chain.len()),
        Err(Error::EmptyInterval { .. }) => Ok(0),
        Err(e) => Err(format!("n = {n}: {e}")),
    }
}

fn c2_sandwich() -> Outcome {
    let g = exact_g_prefix(SANDWICH_MAX).map_err(|e| e.to_string())?;
    let limit = greedy_table_limit(SANDWICH_MAX).max(floor_sqrt_half_n_log_n(SANDWICH_MAX));
    let table = PrimeTable::new(limit).map_err(|e| e.to_string())?;
    let mut tightest = (u64::MAX, 0);
    for n in 3..=SANDWICH_MAX {
        let lower = greedy_len(&table, n)? as u64;
        let upper = upper_bound_with(&table, n).map_err(|e| e.to_string())?;
        let gn = g[n as usize] as u64;
        ensure(lower <= gn && gn <= upper, || {
            format!("n = {n}: {lower} <= {gn} <= {upper} fails")
        })?;
        if upper - gn < tightest.0 {
            tightest = (upper - gn, n);
        }
    }
    Ok(format!(
        "0 violations over n in [3, {SANDWICH_MAX}]; smallest upper gap {} at n = {}",
        tightest.0, tightest.1
    ))
}

fn check_lemmas(trace: &GreedyTrace) -> Result<(), String> {
    let n = trace.n;
    let mut sum = 0u64;
    for (i, s) in trace.steps.iter().enumerate() {
        sum += s.p;
        ensure(s.partial_sum == sum, || {
            format!("n = {n}: partial sum at {i}")
        })?;
        ensure(s.a == s.q * s.p, || format!("n = {n}: a != q p at {i}"))?;
        ensure(s.a <= sum, || format!("n = {n}: a_{i} = {} > {sum}", s.a))?;
        if i > 0 {
            let prev = trace.steps[i - 1].a;
            ensure(s.a < prev + s.p, || {
                format!("n = {n}: a_{i} = {} >= {prev} + {}", s.a, s.p)
            })?;
            ensure(s.a > prev, || format!("n = {n}: not increasing at {i}"))?;
        }
    }
    validate_chain(&trace.chain).map_err(|v| format!("n = {n}: {v}"))
}

fn c3_greedy_lemmas() -> Outcome {
    let table = PrimeTable::new(greedy_table_limit(LEMMA_MAX)).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(SEED ^ 3);
    let (lo, hi) = (3f64.ln(), (LEMMA_MAX as f64).ln());
    let mut ns: Vec<u64> = (0..LEMMA_SAMPLES)
        .map(|_| (rng.random_range(lo..=hi).exp().round() as u64).clamp(3, LEMMA_MAX))
        .chain([3, LEMMA_MAX])
        .collect();
    ns.sort_unstable();
    ns.dedup();
    let (mut tested, mut empty, mut steps) = (0usize, 0usize, 0usize);
    for &n in &ns {
        match paper_greedy_with(&table, n) {
            Ok(trace) => {
                check_lemmas(&trace)?;
                tested += 1;
                steps += trace.steps.len();
            }
            Err(Error::EmptyInterval { .. }) => empty += 1,
            Err(e) => return Err(format!("n = {n}: {e}")),
        }
    }
    ensure(tested >= LEMMA_MIN_POINTS, || {
        format!("only {tested} nonempty constructions sampled")
    })?;
    Ok(format!(
        "{tested} log-uniform n in [3, {LEMMA_MAX}] ({steps} steps) hold; {empty} with no interval primes"
    ))
}

fn c4_prime_sum() -> Outcome {
    let stats = prime_stats_at(&PRIME_SUM_XS).map_err(|e| e.to_string())?;
    let reports: Vec<_> = PRIME_SUM_XS
        .iter()
        .zip(&stats)
        .map(|(&x, &(_, s))| expansion_from_sum(x, s))
        .collect();
    for r in &reports {
        ensure(r.rel_err < PRIME_SUM_REL_TOL, || {
            format!("x = {}: relative error {:.4e}", r.x, r.rel_err)
        })?;
    }
    let norms: Vec<f64> = reports.iter().map(|r| r.err_over_x2_log3).collect();
    let hi = norms.iter().cloned().fold(f64::MIN, f64::max);
    let lo = norms.iter().cloned().fold(f64::MAX, f64::min);
    let factor = hi / lo;
    ensure(lo > 0.0 && factor <= PRIME_SUM_BAND, || {
        format!("normalized errors {norms:?} span a factor {factor:.3}")
    })?;
    let rel: Vec<String> = reports
        .iter()
        .map(|r| format!("{:.2e}", r.rel_err))
        .collect();
    let nrm: Vec<String> = norms.iter().map(|v| format!("{v:.4}")).collect();
    Ok(format!(
        "relative errors [{}], normalized errors [{}], band factor {factor:.3}",
        rel.join(", "),
        nrm.join(", ")
    ))
}

fn c5_ratio() -> Outcome {
    let g = exact_g_prefix(RATIO_MAX).map_err(|e| e.to_string())?;
    let ratio = |n: u64| g[n as usize] as f64 / sqrt_n_over_log_n(n);
    let (mut rmin, mut rmax) = (f64::MAX, f64::MIN);
    let mut in_window = 0u64;
    for n in RATIO_FROM..=RATIO_MAX {
        let r = ratio(n);
        ensure(RATIO_BAND.0 < r && r < RATIO_BAND.1, || {
            format!("n = {n}: ratio {r:.4} outside {RATIO_BAND:?}")
        })?;
        rmin = rmin.min(r);
        rmax = rmax.max(r);
        if (2.0..=2.0 * std::f64::consts::SQRT_2).contains(&r) {
            in_window += 1;
        }
    }
    let above = |n: u64| ratio(n) > 2.0;
    let first = (3..=RATIO_MAX).find(|&n| above(n));
    let last_below = (3..=RATIO_MAX).rev().find(|&n| !above(n));
    let total = RATIO_MAX - RATIO_FROM + 1;
    Ok(format!(
        "ratio in [{rmin:.4}, {rmax:.4}] on [{RATIO_FROM}, {RATIO_MAX}]; g > 2 sqrt(n/log n) first at n = {}, \
         for every n > {} in range; {in_window}/{total} inside [2, 2.8284] (reported only)",
        first.map_or("none".into(), |n| n.to_string()),
        last_below.map_or("2".into(), |n| n.to_string()),
    ))
}

fn vm_hwm_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Child side of criterion 6: a fresh process so the high-water mark
/// reflects only this computation.
fn perf_child() -> ExitCode {
    let t = Instant::now();
    let r = exact_g(PERF_N, false).expect("exact_g");
    let elapsed = t.elapsed();
    let hwm = vm_hwm_bytes().unwrap_or(u64::MAX);
    println!("{} {} {}", r.g, elapsed.as_nanos(), hwm);
    ExitCode::SUCCESS
}

fn c6_performance() -> Outcome {
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let out = Command::new(exe)
        .env(CHILD_ENV, "perf")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("child failed: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    let text = String::from_utf8_lossy(&out.stdout);
    let fields: Vec<u64> = text
        .split_whitespace()
        .map(|f| f.parse().map_err(|_| format!("bad child output `{text}`")))
        .collect::<Result<_, _>>()?;
    let [g, nanos, hwm] = fields[..] else {
        return Err(format!("bad child output `{text}`"));
    };
    let elapsed = Duration::from_nanos(nanos);
    ensure(hwm != u64::MAX, || "VmHWM unavailable".into())?;
    ensure(elapsed < PERF_TIME, || {
        format!("exact_g({PERF_N}) took {elapsed:?}")
    })?;
    ensure(hwm < PERF_MEMORY_BYTES, || {
        format!("peak resident memory {} MiB", hwm >> 20)
    })?;

    let reference: Vec<u64> = {
        let mut s = LpfStream::new(SEGMENT_N, SEGMENT_N as usize).map_err(|e| e.to_string())?;
        let mut v = Vec::new();
        while let Some((_, seg)) = s.next_segment() {
            v.extend(seg.iter().map(|&p| p as u64));
        }
        v
    };
    for size in SEGMENT_SIZES {
        let got: Vec<u64> = LpfStream::new(SEGMENT_N, size)
            .map_err(|e| e.to_string())?
            .map(|(_, p)| p)
            .collect();
        ensure(got == reference, || format!("segment size {size} differs"))?;
    }
    Ok(format!(
        "g({PERF_N}) = {g} in {:.2} s, peak RSS {:.1} MiB; segment sizes {SEGMENT_SIZES:?} agree at n = {SEGMENT_N}",
        elapsed.as_secs_f64(),
        hwm as f64 / (1u64 << 20) as f64
    ))
}

fn c7_determinism() -> Outcome {
    let run = |threads: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_lpfchains"))
            .args(SCAN_ARGS)
            .args(["--threads", threads])
            .env_remove("LPFCHAINS_MAX_MEMORY")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!(
                "--threads {threads}: {}",
                String::from_utf8_lossy(&out.stderr)
            )
        })?;
        Ok(out.stdout)
    };
    let base = run(THREAD_COUNTS[0])?;
    ensure(base == run(THREAD_COUNTS[0])?, || {
        "repeat run differs".into()
    })?;
    for t in &THREAD_COUNTS[1..] {
        ensure(run(t)? == base, || {
            format!("--threads {t} differs from --threads 1")
        })?;
    }
    let rows = base.iter().filter(|&&b| b == b'\n').count() - 1;
    Ok(format!(
        "{rows} rows byte-identical for --threads {}",
        THREAD_COUNTS.join(", ")
    ))
}

fn main() -> ExitCode {
    if std::env::var(CHILD_ENV).as_deref() == Ok("perf") {
        return perf_child();
    }
    // libtest arguments such as --nocapture are accepted and ignored; a
    // listing request gets a single entry.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }

    let criteria: [Criterion; 7] = [
        ("oracle equivalence", c1_oracle_equivalence),
        ("finite sandwich", c2_sandwich),
        ("construction lemmas", c3_greedy_lemmas),
        ("prime-sum expansion", c4_prime_sum),
        ("ratio band", c5_ratio),
        ("performance envelope", c6_performance),
        ("determinism", c7_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}, {secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {} ({name}, {secs:.1} s): {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
