//! CSV and JSON encodings.
//!
//! | artifact        | CSV header                                              |
//! |-----------------|---------------------------------------------------------|
//! | chain           | `i,a,p`                                                 |
//! | greedy trace    | `i,a,p,q,partial_sum,overshoot_flag`                    |
//! | bounds / scan   | `n,g_exact,lower_len,upper,ratio,sqrt_n_over_log_n`     |
//! | prime sums      | `x,exact_sum,term1,term2,abs_err,rel_err,err_norm`      |
//! | prime counts    | `x,pi,estimate,residual`                                |
//! | lpf dump        | `m,lpf`                                                 |
//!
//! JSON uses the same field names. A chain in JSON is an array of
//! `{"a": .., "p": ..}` objects. Floats use the shortest representation
//! that round-trips, so every file reads back without loss.

use std::io::{Read, Write};

use lpfchains_core::asymptotics::{BoundsRow, ExpansionReport, PiReport, SumBoundCheck};
use lpfchains_core::construct::GreedyTrace;
use lpfchains_core::{Chain, ChainElement, GResult};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub a: u64,
    pub p: u64,
}

impl From<&ChainElement> for ChainRecord {
    fn from(e: &ChainElement) -> Self {
        ChainRecord { a: e.a, p: e.p }
    }
}

fn records(chain: &Chain) -> Vec<ChainRecord> {
    chain.elements.iter().map(ChainRecord::from).collect()
}

pub fn write_chain_csv<W: Write>(w: W, chain: &Chain) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["i", "a", "p"])?;
    for (i, e) in chain.elements.iter().enumerate() {
        out.write_record([i.to_string(), e.a.to_string(), e.p.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_chain_json<W: Write>(mut w: W, chain: &Chain) -> Result<(), CliError> {
    serde_json::to_writer(&mut w, &records(chain)).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct ExactJson {
    n: u64,
    g: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<ChainRecord>>,
}

pub fn write_exact_json<W: Write>(mut w: W, r: &GResult) -> Result<(), CliError> {
    let body = ExactJson {
        n: r.n,
        g: r.g,
        witness: r.witness.as_ref().map(records),
    };
    serde_json::to_writer(&mut w, &body).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

/// `n,g`, or the witness chain as `i,a,p` when one was requested.
pub fn write_exact_csv<W: Write>(w: W, r: &GResult) -> Result<(), CliError> {
    if let Some(chain) = &r.witness {
        return write_chain_csv(w, chain);
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "g"])?;
    out.write_record([r.n.to_string(), r.g.to_string()])?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StepJson {
    i: usize,
    a: u64,
    p: u64,
    q: u64,
    partial_sum: u64,
    overshoot_flag: bool,
}

#[derive(Serialize)]
struct SumCheckJson {
    x: u64,
    sum: u128,
    holds: bool,
    margin: f64,
}

#[derive(Serialize)]
struct GreedyJson {
    n: u64,
    primes_used: Vec<u64>,
    steps: Vec<StepJson>,
    chain: Vec<ChainRecord>,
    overshoot_index: Option<usize>,
    sum_check: SumCheckJson,
}

pub fn write_greedy_csv<W: Write>(w: W, t: &GreedyTrace) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["i", "a", "p", "q", "partial_sum", "overshoot_flag"])?;
    for (i, s) in t.steps.iter().enumerate() {
        out.write_record([
            i.to_string(),
            s.a.to_string(),
            s.p.to_string(),
            s.q.to_string(),
            s.partial_sum.to_string(),
            u8::from(s.overshoot).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_greedy_json<W: Write>(
    mut w: W,
    t: &GreedyTrace,
    check: &SumBoundCheck,
) -> Result<(), CliError> {
    let body = GreedyJson {
        n: t.n,
        primes_used: t.primes_used.clone(),
        steps: t
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| StepJson {
                i,
                a: s.a,
                p: s.p,
                q: s.q,
                partial_sum: s.partial_sum,
                overshoot_flag: s.overshoot,
            })
            .collect(),
        chain: records(&t.chain),
        overshoot_index: t.overshoot_index,
        sum_check: SumCheckJson {
            x: check.x,
            sum: check.sum,
            holds: check.holds,
            margin: check.margin,
        },
    };
    serde_json::to_writer(&mut w, &body).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

pub const BOUNDS_HEADER: [&str; 6] = [
    "n",
    "g_exact",
    "lower_len",
    "upper",
    "ratio",
    "sqrt_n_over_log_n",
];

/// Rows that failed keep their `n` and leave every other field empty.
pub fn write_bounds_csv<W: Write>(w: W, rows: &[BoundsRow]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(BOUNDS_HEADER)?;
    for r in rows {
        if r.error.is_some() {
            out.write_record([
                r.n.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ])?;
            continue;
        }
        out.write_record([
            r.n.to_string(),
            r.g_exact.map(|g| g.to_string()).unwrap_or_default(),
            r.lower_len.to_string(),
            r.upper.to_string(),
            r.ratio.to_string(),
            r.sqrt_n_over_log_n.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRowJson {
    pub n: u64,
    pub g_exact: Option<u64>,
    pub lower_len: Option<u64>,
    pub upper: Option<u64>,
    pub ratio: Option<f64>,
    pub sqrt_n_over_log_n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl From<&BoundsRow> for BoundsRowJson {
    fn from(r: &BoundsRow) -> Self {
        let ok = r.error.is_none();
        BoundsRowJson {
            n: r.n,
            g_exact: r.g_exact,
            lower_len: ok.then_some(r.lower_len),
            upper: ok.then_some(r.upper),
            ratio: ok.then_some(r.ratio),
            sqrt_n_over_log_n: ok.then_some(r.sqrt_n_over_log_n),
            error: r.error.as_ref().map(|e| e.to_string()),
        }
    }
}

pub fn write_bounds_json<W: Write>(mut w: W, rows: &[BoundsRow]) -> Result<(), CliError> {
    let body: Vec<BoundsRowJson> = rows.iter().map(BoundsRowJson::from).collect();
    serde_json::to_writer(&mut w, &body).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

/// Parses the bounds CSV back; failed rows come back with empty fields.
pub fn read_bounds_csv<R: Read>(r: R) -> Result<Vec<BoundsRowJson>, CliError> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(BOUNDS_HEADER) {
        return Err(CliError::Input(format!(
            "unexpected bounds header {headers:?}"
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let opt_u = |i: usize| -> Result<Option<u64>, CliError> {
            let s = &rec[i];
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| CliError::Input(format!("bad integer {s:?}")))
            }
        };
        let opt_f = |i: usize| -> Result<Option<f64>, CliError> {
            let s = &rec[i];
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| CliError::Input(format!("bad float {s:?}")))
            }
        };
        rows.push(BoundsRowJson {
            n: opt_u(0)?.ok_or_else(|| CliError::Input("missing n".into()))?,
            g_exact: opt_u(1)?,
            lower_len: opt_u(2)?,
            upper: opt_u(3)?,
            ratio: opt_f(4)?,
            sqrt_n_over_log_n: opt_f(5)?,
            error: None,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ExpansionJson {
    x: u64,
    exact_sum: u128,
    term1: f64,
    term2: f64,
    abs_err: f64,
    rel_err: f64,
    err_norm: f64,
}

pub fn write_expansion_csv<W: Write>(w: W, rows: &[ExpansionReport]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "x",
        "exact_sum",
        "term1",
        "term2",
        "abs_err",
        "rel_err",
        "err_norm",
    ])?;
    for r in rows {
        out.write_record([
            r.x.to_string(),
            r.exact_sum.to_string(),
            r.term1.to_string(),
            r.term2.to_string(),
            r.abs_err.to_string(),
            r.rel_err.to_string(),
            r.err_over_x2_log3.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_expansion_json<W: Write>(mut w: W, rows: &[ExpansionReport]) -> Result<(), CliError> {
    let body: Vec<ExpansionJson> = rows
        .iter()
        .map(|r| ExpansionJson {
            x: r.x,
            exact_sum: r.exact_sum,
            term1: r.term1,
            term2: r.term2,
            abs_err: r.abs_err,
            rel_err: r.rel_err,
            err_norm: r.err_over_x2_log3,
        })
        .collect();
    serde_json::to_writer(&mut w, &body).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

#[derive(Serialize)]
struct PiJson {
    x: u64,
    pi: u64,
    estimate: f64,
    residual: f64,
}

pub fn write_pi_csv<W: Write>(w: W, rows: &[PiReport]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "pi", "estimate", "residual"])?;
    for r in rows {
        out.write_record([
            r.x.to_string(),
            r.pi.to_string(),
            r.estimate.to_string(),
            r.residual.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_pi_json<W: Write>(mut w: W, rows: &[PiReport]) -> Result<(), CliError> {
    let body: Vec<PiJson> = rows
        .iter()
        .map(|r| PiJson {
            x: r.x,
            pi: r.pi,
            estimate: r.estimate,
            residual: r.residual,
        })
        .collect();
    serde_json::to_writer(&mut w, &body).map_err(std::io::Error::from)?;
    writeln!(w)?;
    Ok(())
}

/// Reads a chain from CSV (any header containing `a` and `p`) or JSON (an
/// array of `{a, p}`, or an object holding one under `witness` or `chain`).
pub fn read_chain<R: Read>(mut r: R, n: u64) -> Result<Chain, CliError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let records = match text.trim_start().chars().next() {
        Some('[') | Some('{') => parse_chain_json(&text)?,
        _ => parse_chain_csv(text.as_bytes())?,
    };
    Ok(Chain::new(
        n,
        records
            .into_iter()
            .map(|r| ChainElement::new(r.a, r.p))
            .collect(),
    ))
}

fn parse_chain_json(text: &str) -> Result<Vec<ChainRecord>, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    let array = match value {
        serde_json::Value::Object(mut map) => map
            .remove("witness")
            .or_else(|| map.remove("chain"))
            .ok_or_else(|| CliError::Input("JSON object has no `witness` or `chain`".into()))?,
        v => v,
    };
    serde_json::from_value(array).map_err(|e| CliError::Input(e.to_string()))
}

fn parse_chain_csv(bytes: &[u8]) -> Result<Vec<ChainRecord>, CliError> {
    let mut rdr = csv::Reader::from_reader(bytes);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Input(format!("CSV header lacks column `{name}`")))
    };
    let (ia, ip) = (col("a")?, col("p")?);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<u64, CliError> {
            let s = rec.get(i).unwrap_or("").trim();
            s.parse().map_err(|_| {
                CliError::Input(format!(
                    "bad integer {s:?} on line {}",
                    rec.position().map_or(0, |p| p.line())
                ))
            })
        };
        out.push(ChainRecord {
            a: field(ia)?,
            p: field(ip)?,
        });
    }
    Ok(out)
}

pub fn write_lpf_csv<W: Write>(
    w: W,
    pairs: impl Iterator<Item = (u64, u64)>,
) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["m", "lpf"])?;
    for (m, p) in pairs {
        out.write_record([m.to_string(), p.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpfchains_core::{construct::paper_greedy, validate_chain};

    fn greedy_chain() -> Chain {
        paper_greedy(100).unwrap().chain
    }

    #[test]
    fn chain_csv_round_trip_validates() {
        let chain = greedy_chain();
        let mut buf = Vec::new();
        write_chain_csv(&mut buf, &chain).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "i,a,p\n0,19,19\n1,34,17\n2,39,13\n3,44,11\n"
        );
        let back = read_chain(buf.as_slice(), 100).unwrap();
        assert_eq!(back, chain);
        validate_chain(&back).unwrap();
    }

    #[test]
    fn chain_json_round_trip_validates() {
        let chain = greedy_chain();
        let mut buf = Vec::new();
        write_chain_json(&mut buf, &chain).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "[{\"a\":19,\"p\":19},{\"a\":34,\"p\":17},{\"a\":39,\"p\":13},{\"a\":44,\"p\":11}]\n"
        );
        assert_eq!(read_chain(buf.as_slice(), 100).unwrap(), chain);
    }

    #[test]
    fn exact_json_shape() {
        let r = lpfchains_core::exact_g(10, true).unwrap();
        let mut buf = Vec::new();
        write_exact_json(&mut buf, &r).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["n"], 10);
        assert_eq!(v["g"], 3);
        assert_eq!(v["witness"].as_array().unwrap().len(), 3);
        let back = read_chain(buf.as_slice(), 10).unwrap();
        validate_chain(&back).unwrap();
    }

    #[test]
    fn greedy_csv_is_readable_as_chain() {
        let t = paper_greedy(100).unwrap();
        let mut buf = Vec::new();
        write_greedy_csv(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("i,a,p,q,partial_sum,overshoot_flag\n0,19,19,1,19,0\n"));
        assert_eq!(read_chain(buf.as_slice(), 100).unwrap(), t.chain);
    }

    #[test]
    fn bounds_csv_round_trip() {
        let rows = lpfchains_core::scan(&[2, 10, 100], &Default::default()).unwrap();
        let mut buf = Vec::new();
        write_bounds_csv(&mut buf, &rows).unwrap();
        let back = read_bounds_csv(buf.as_slice()).unwrap();
        let direct: Vec<BoundsRowJson> = rows
            .iter()
            .map(|r| BoundsRowJson {
                error: None,
                ..BoundsRowJson::from(r)
            })
            .collect();
        assert_eq!(back, direct);
        assert_eq!(back[0].upper, None);
        assert_eq!(back[1].g_exact, Some(3));
    }

    #[test]
    fn malformed_chain_input() {
        assert!(matches!(
            read_chain("x,y\n1,2\n".as_bytes(), 10),
            Err(CliError::Input(_))
        ));
        assert!(matches!(
            read_chain("a,p\n4,two\n".as_bytes(), 10),
            Err(CliError::Input(_))
        ));
        assert!(matches!(
            read_chain("{\"foo\":1}".as_bytes(), 10),
            Err(CliError::Input(_))
        ));
    }
}
