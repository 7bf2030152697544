//! The `lpfchains` command line.
//!
//! Exit codes: 0 success, 1 chain failed validation, 2 usage or parameter
//! error, 3 resource or cap exceeded, 4 IO or malformed input file. Errors
//! go to stderr as a one-line JSON object `{"error": kind, "message": ..}`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lpfchains_core::asymptotics::{
    expansion_from_sum, pi_report_from_count, prime_stats_at, sum_bound_check, BoundsRow,
    BoundsSweep, ScanConfig,
};
use lpfchains_core::chains::{ExactOptions, WITNESS_CAP};
use lpfchains_core::construct::{adaptive_greedy_with, greedy_table_limit, paper_greedy_with};
use lpfchains_core::numeric::{ln, sqrt};
use lpfchains_core::sieve::{lpf_stream, MemoryBudget, DEFAULT_SEGMENT_SIZE};
use lpfchains_core::{validate_chain, Chain, GResult, PrimeTable};
use rayon::ThreadPool;

use crate::format;
use crate::parallel::{exact_g_parallel, scan_parallel, thread_pool};
use crate::CliError;

/// Environment variable holding the sieve allocation cap in bytes
/// (suffixes `K`, `M`, `G` accepted).
pub const MAX_MEMORY_ENV: &str = "LPFCHAINS_MAX_MEMORY";

#[derive(Debug, Parser)]
#[command(
    name = "lpfchains",
    version,
    about = "Longest sequences with strictly decreasing largest prime factors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format [default: json for `exact`, csv otherwise]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for sieving and scans (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Integers per sieve segment
    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_SIZE, value_parser = parse_positive_usize)]
    pub segment_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact g(n), optionally with an optimal chain
    Exact {
        #[arg(long, value_parser = parse_count)]
        n: u64,
        /// Reconstruct one optimal chain (O(n) memory)
        #[arg(long)]
        witness: bool,
        /// Largest n for which --witness is accepted
        #[arg(long, default_value_t = WITNESS_CAP, value_parser = parse_count)]
        witness_cap: u64,
    },
    /// The greedy construction over the primes of (sqrt n, sqrt(n log n))
    Greedy {
        #[arg(long, value_parser = parse_count)]
        n: u64,
    },
    /// Greedy construction over all primes below a start bound
    Adaptive {
        #[arg(long, value_parser = parse_count)]
        n: u64,
        /// Largest prime to start from [default: sqrt(n log n)]
        #[arg(long)]
        start_bound: Option<f64>,
    },
    /// Lower construction, exact value and upper bound for one n
    Bounds {
        #[arg(long, value_parser = parse_count)]
        n: u64,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Bounds rows over a range of n
    Scan {
        #[command(flatten)]
        range: RangeArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Exact prime sums against the two-term expansion
    Primesum {
        #[command(flatten)]
        points: PointArgs,
    },
    /// Exact prime counts against the two-term estimate
    Pi {
        #[command(flatten)]
        points: PointArgs,
    },
    /// Check a chain file (CSV `a,p` columns or JSON) against bound n
    Validate {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_parser = parse_count)]
        n: u64,
    },
    /// Dump (m, P(m)) for m = 2..=n as CSV
    #[command(hide = true)]
    Lpf {
        #[arg(long, value_parser = parse_count)]
        n: u64,
    },
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// n above which the exact value is skipped
    #[arg(long, default_value_t = 10_000_000, value_parser = parse_count)]
    pub exact_cap: u64,
    /// Start bounds for the adaptive construction, `lo:hi:count` geometric
    #[arg(long, value_parser = parse_sweep)]
    pub bounds_sweep: Option<BoundsSweep>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// `lo:hi[:step]`; numbers may be written as 1e6 or 1_000_000
    #[arg(long, value_parser = parse_range)]
    pub range: RangeSpec,
    /// Multiply by step (default 10) instead of adding it (default 1)
    #[arg(long)]
    pub geometric: bool,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, value_parser = parse_count, conflicts_with = "range", required_unless_present = "range")]
    pub x: Option<u64>,
    /// `lo:hi[:step]`, as for `scan`
    #[arg(long, value_parser = parse_range)]
    pub range: Option<RangeSpec>,
    #[arg(long, requires = "range")]
    pub geometric: bool,
}

impl PointArgs {
    fn points(&self) -> Result<Vec<u64>, CliError> {
        match (self.x, &self.range) {
            (Some(x), _) => Ok(vec![x]),
            (None, Some(r)) => r.expand(self.geometric),
            (None, None) => Err(CliError::Usage("one of --x or --range is required".into())),
        }
    }
}

/// Parses a nonnegative integer, accepting `1e6` and `1_000_000` forms.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = t.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= 9.007_199_254_740_992e15) {
        return Err(format!("`{s}` is not a nonnegative integer"));
    }
    Ok(f as u64)
}

fn parse_positive_usize(s: &str) -> Result<usize, String> {
    match parse_count(s)? {
        0 => Err("must be positive".into()),
        v => usize::try_from(v).map_err(|e| e.to_string()),
    }
}

/// `lo:hi[:step]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub lo: u64,
    pub hi: u64,
    pub step: Option<f64>,
}

pub fn parse_range(s: &str) -> Result<RangeSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(format!("`{s}` is not of the form lo:hi[:step]"));
    }
    let lo = parse_count(parts[0])?;
    let hi = parse_count(parts[1])?;
    if lo > hi {
        return Err(format!("range `{s}` has lo > hi"));
    }
    let step = match parts.get(2) {
        Some(p) => Some(
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("step `{p}` is not a number"))?,
        ),
        None => None,
    };
    Ok(RangeSpec { lo, hi, step })
}

impl RangeSpec {
    /// Strictly ascending points from `lo` up to at most `hi`.
    pub fn expand(&self, geometric: bool) -> Result<Vec<u64>, CliError> {
        let mut out = Vec::new();
        if geometric {
            let step = self.step.unwrap_or(10.0);
            if !(step.is_finite() && step > 1.0) {
                return Err(CliError::Usage("geometric step must exceed 1".into()));
            }
            if self.lo == 0 {
                return Err(CliError::Usage(
                    "geometric ranges must start above 0".into(),
                ));
            }
            let integral = step.fract() == 0.0;
            let mut k = 0i32;
            loop {
                let v = if integral {
                    (step as u64)
                        .checked_pow(k as u32)
                        .and_then(|f| f.checked_mul(self.lo))
                } else {
                    let f = (self.lo as f64 * step.powi(k)).round();
                    (f < u64::MAX as f64).then_some(f as u64)
                };
                match v {
                    Some(v) if v <= self.hi => {
                        if out.last() != Some(&v) {
                            out.push(v);
                        }
                    }
                    _ => break,
                }
                k += 1;
            }
        } else {
            let step = self.step.unwrap_or(1.0);
            if !(step >= 1.0 && step.fract() == 0.0) {
                return Err(CliError::Usage(
                    "linear step must be a positive integer".into(),
                ));
            }
            out.extend((self.lo..=self.hi).step_by(step as usize));
        }
        Ok(out)
    }
}

/// `lo:hi:count`.
pub fn parse_sweep(s: &str) -> Result<BoundsSweep, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(format!("`{s}` is not of the form lo:hi:count"));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad bound `{lo}`"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad bound `{hi}`"))?;
    let count = parse_count(count)? as usize;
    if !(lo >= 2.0 && hi >= lo && count >= 1) {
        return Err(format!("sweep `{s}` needs 2 <= lo <= hi and count >= 1"));
    }
    Ok(BoundsSweep::Geometric { lo, hi, count })
}

/// Parses a byte count with an optional `K`, `M` or `G` suffix.
pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let t = s.trim();
    let (digits, shift) = match t.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&t[..t.len() - 1], 10),
        Some('M') => (&t[..t.len() - 1], 20),
        Some('G') => (&t[..t.len() - 1], 30),
        _ => (t, 0),
    };
    let v = parse_count(digits)?;
    v.checked_mul(1 << shift)
        .ok_or_else(|| format!("`{s}` overflows"))
}

fn budget_from_env() -> Result<MemoryBudget, CliError> {
    match std::env::var(MAX_MEMORY_ENV) {
        Ok(v) => parse_bytes(&v)
            .map(MemoryBudget::bytes)
            .map_err(|e| CliError::Usage(format!("{MAX_MEMORY_ENV}: {e}"))),
        Err(_) => Ok(MemoryBudget::DEFAULT),
    }
}

struct Context {
    format: Format,
    pool: ThreadPool,
    budget: MemoryBudget,
    segment_size: usize,
}

impl Context {
    fn exact_options(&self, witness_cap: u64) -> ExactOptions {
        ExactOptions {
            segment_size: self.segment_size,
            witness_cap,
            budget: self.budget,
        }
    }

    fn scan_config(&self, sweep: &SweepArgs) -> ScanConfig {
        ScanConfig {
            exact_cap: sweep.exact_cap,
            sweep: sweep.bounds_sweep.clone().unwrap_or_default(),
            exact: self.exact_options(WITNESS_CAP),
        }
    }
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Exact { .. } => Format::Json,
        _ => Format::Csv,
    }
}

/// Runs a parsed command, writing to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let pool = thread_pool(cli.threads).map_err(|e| CliError::Usage(e.to_string()))?;
    let ctx = Context {
        format: cli.format.unwrap_or_else(|| default_format(&cli.command)),
        pool,
        budget: budget_from_env()?,
        segment_size: cli.segment_size,
    };
    match &cli.command {
        Command::Exact {
            n,
            witness,
            witness_cap,
        } => {
            let r = exact_g_parallel(*n, *witness, &ctx.exact_options(*witness_cap), &ctx.pool)?;
            emit_exact(&ctx, out, &r)
        }
        Command::Greedy { n } => {
            let table = PrimeTable::with_budget(greedy_table_limit(*n), ctx.budget)?;
            let trace = paper_greedy_with(&table, *n)?;
            let check = sum_bound_check(*n)?;
            match ctx.format {
                Format::Csv => format::write_greedy_csv(out, &trace),
                Format::Json => format::write_greedy_json(out, &trace, &check),
                Format::Human => {
                    writeln!(
                        out,
                        "n = {}: {} primes in (sqrt n, sqrt(n log n)), chain length {}",
                        trace.n,
                        trace.primes_used.len(),
                        trace.chain.len()
                    )?;
                    for (i, s) in trace.steps.iter().enumerate() {
                        writeln!(
                            out,
                            "  {i:>4}  a = {:>10} = {} * {}  partial sum {}{}",
                            s.a,
                            s.q,
                            s.p,
                            s.partial_sum,
                            if s.overshoot { "  (> n)" } else { "" }
                        )?;
                    }
                    writeln!(
                        out,
                        "sum of primes <= {} is {} ({} n, margin {:.4})",
                        check.x,
                        check.sum,
                        if check.holds { "<" } else { ">=" },
                        check.margin
                    )?;
                    Ok(())
                }
            }
        }
        Command::Adaptive { n, start_bound } => {
            let x = *n as f64;
            let bound = start_bound.unwrap_or_else(|| sqrt(x * ln(x)).min(x));
            if !(2.0..=x).contains(&bound) {
                return Err(CliError::Usage(format!(
                    "--start-bound must lie in [2, {n}]"
                )));
            }
            let table = PrimeTable::with_budget(bound as u64, ctx.budget)?;
            let chain = adaptive_greedy_with(&table, *n, bound)?;
            emit_chain(&ctx, out, &chain)
        }
        Command::Bounds { n, sweep } => {
            let rows = scan_parallel(&[*n], &ctx.scan_config(sweep), &ctx.pool)?;
            if let Some(e) = &rows[0].error {
                return Err(CliError::Core(e.clone()));
            }
            emit_rows(&ctx, out, &rows)
        }
        Command::Scan { range, sweep } => {
            let ns = range.range.expand(range.geometric)?;
            let rows = scan_parallel(&ns, &ctx.scan_config(sweep), &ctx.pool)?;
            emit_rows(&ctx, out, &rows)
        }
        Command::Primesum { points } => {
            let xs = points.points()?;
            if xs.first().is_some_and(|&x| x < 3) {
                return Err(CliError::Usage("prime sum expansion needs x >= 3".into()));
            }
            let stats = prime_stats_at(&xs)?;
            let rows: Vec<_> = xs
                .iter()
                .zip(&stats)
                .map(|(&x, &(_, sum))| expansion_from_sum(x, sum))
                .collect();
            match ctx.format {
                Format::Csv => format::write_expansion_csv(out, &rows),
                Format::Json => format::write_expansion_json(out, &rows),
                Format::Human => {
                    for r in &rows {
                        writeln!(
                            out,
                            "x = {}: sum = {}, x^2/(2 log x) + x^2/(4 log^2 x) = {:.1}, rel err {:.3e}, err log^3 x / x^2 = {:.4}",
                            r.x,
                            r.exact_sum,
                            r.term1 + r.term2,
                            r.rel_err,
                            r.err_over_x2_log3
                        )?;
                    }
                    Ok(())
                }
            }
        }
        Command::Pi { points } => {
            let xs = points.points()?;
            if xs.first().is_some_and(|&x| x < 3) {
                return Err(CliError::Usage("pi estimate needs x >= 3".into()));
            }
            let stats = prime_stats_at(&xs)?;
            let rows: Vec<_> = xs
                .iter()
                .zip(&stats)
                .map(|(&x, &(count, _))| pi_report_from_count(x, count))
                .collect();
            match ctx.format {
                Format::Csv => format::write_pi_csv(out, &rows),
                Format::Json => format::write_pi_json(out, &rows),
                Format::Human => {
                    for r in &rows {
                        writeln!(
                            out,
                            "x = {}: pi(x) = {}, (x/log x)(1 + 1/log x) = {:.2}, residual {:.4}",
                            r.x, r.pi, r.estimate, r.residual
                        )?;
                    }
                    Ok(())
                }
            }
        }
        Command::Validate { file, n } => {
            let chain = format::read_chain(File::open(file)?, *n)?;
            let verdict = validate_chain(&chain);
            match ctx.format {
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::json!({
                        "valid": verdict.is_ok(),
                        "length": chain.len(),
                        "violation": verdict.err().map(|v| v.to_string()),
                    })
                )?,
                Format::Csv => {
                    writeln!(out, "valid,length")?;
                    writeln!(out, "{},{}", verdict.is_ok(), chain.len())?;
                }
                Format::Human => match verdict {
                    Ok(()) => writeln!(out, "valid chain of length {} under n = {n}", chain.len())?,
                    Err(v) => writeln!(out, "invalid: {v}")?,
                },
            }
            verdict.map_err(CliError::InvalidChain)
        }
        Command::Lpf { n } => format::write_lpf_csv(out, lpf_stream(*n, ctx.segment_size)?),
    }
}

fn emit_exact(ctx: &Context, out: &mut dyn Write, r: &GResult) -> Result<(), CliError> {
    match ctx.format {
        Format::Json => format::write_exact_json(out, r),
        Format::Csv => format::write_exact_csv(out, r),
        Format::Human => {
            writeln!(out, "g({}) = {}", r.n, r.g)?;
            if let Some(w) = &r.witness {
                write_chain_human(out, w)?;
            }
            Ok(())
        }
    }
}

fn write_chain_human(out: &mut dyn Write, chain: &Chain) -> io::Result<()> {
    for e in &chain.elements {
        writeln!(out, "  a = {:>10}  P(a) = {}", e.a, e.p)?;
    }
    Ok(())
}

fn emit_chain(ctx: &Context, out: &mut dyn Write, chain: &Chain) -> Result<(), CliError> {
    match ctx.format {
        Format::Csv => format::write_chain_csv(out, chain),
        Format::Json => format::write_chain_json(out, chain),
        Format::Human => {
            writeln!(out, "chain of length {} under n = {}", chain.len(), chain.n)?;
            write_chain_human(out, chain)?;
            Ok(())
        }
    }
}

fn emit_rows(ctx: &Context, out: &mut dyn Write, rows: &[BoundsRow]) -> Result<(), CliError> {
    match ctx.format {
        Format::Csv => format::write_bounds_csv(out, rows),
        Format::Json => format::write_bounds_json(out, rows),
        Format::Human => {
            for r in rows {
                if let Some(e) = &r.error {
                    writeln!(out, "n = {}: error: {e}", r.n)?;
                    continue;
                }
                let middle = match r.g_exact {
                    Some(g) => format!("g = {g}"),
                    None => "g".to_string(),
                };
                writeln!(
                    out,
                    "n = {}: {} <= {} <= {}   ratio {:.4} (window [2, 2.8284]: {})",
                    r.n,
                    r.lower_len,
                    middle,
                    r.upper,
                    r.ratio,
                    if r.in_c_window() { "inside" } else { "outside" }
                )?;
            }
            Ok(())
        }
    }
}

/// Entry point for the binary: parses arguments, runs, returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let e = CliError::Usage(clap_message(&e.to_string()));
            eprintln!("{}", e.to_json());
            return e.exit_code();
        }
    };
    let result = (|| -> Result<(), CliError> {
        match &cli.out {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                let r = run(&cli, &mut w);
                w.flush()?;
                r
            }
            None => {
                let stdout = io::stdout();
                let mut w = BufWriter::new(stdout.lock());
                let r = run(&cli, &mut w);
                w.flush()?;
                r
            }
        }
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

/// The rendered clap error without its usage and help footer.
fn clap_message(rendered: &str) -> String {
    rendered
        .lines()
        .take_while(|l| !l.starts_with("Usage:"))
        .map(|l| l.trim().trim_start_matches("error: "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}
