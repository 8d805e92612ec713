//! Text, JSON and CSV renderings of suite results.

use std::fmt::Write as _;
use std::str::FromStr;

use qseries_core::report::{Status, VerificationReport};
use serde::Serialize;

use crate::suites::{PrimeChoice, RunConfig, SuiteResult, Summary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format '{}' (text, json or csv)", s)),
        }
    }
}

#[derive(Serialize)]
struct RunJson<'a> {
    suites: Vec<&'static str>,
    order: usize,
    terms: usize,
    family_terms: usize,
    counts: usize,
    alphas: &'a [u32],
    primes: PrimesJson<'a>,
    prime_bound: u64,
    budget: usize,
}

#[derive(Serialize)]
#[serde(untagged)]
enum PrimesJson<'a> {
    Auto(&'static str),
    List(&'a [u64]),
}

#[derive(Serialize)]
struct ParamsJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j_range: Option<[u64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    modulus: Option<u64>,
}

#[derive(Serialize)]
struct FailureJson<'a> {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<u64>,
    lhs: &'a str,
    rhs: &'a str,
}

#[derive(Serialize)]
struct CheckJson<'a> {
    id: &'a str,
    suite: &'static str,
    paper_label: &'a str,
    params: ParamsJson,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_failure: Option<FailureJson<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u64>,
}

#[derive(Serialize)]
struct SummaryJson {
    pass: usize,
    fail: usize,
    skip: usize,
    error: usize,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    run: RunJson<'a>,
    checks: Vec<CheckJson<'a>>,
    summary: SummaryJson,
}

fn rows(results: &[SuiteResult]) -> impl Iterator<Item = (&'static str, &VerificationReport)> {
    results
        .iter()
        .flat_map(|s| s.reports.iter().map(move |r| (s.suite.as_str(), r)))
}

pub fn total_summary(results: &[SuiteResult]) -> Summary {
    Summary::of(results.iter().flat_map(|s| s.reports.iter()))
}

pub fn to_json(results: &[SuiteResult], cfg: &RunConfig) -> String {
    let summary = total_summary(results);
    let doc = ReportJson {
        run: RunJson {
            suites: results.iter().map(|s| s.suite.as_str()).collect(),
            order: cfg.order,
            terms: cfg.terms,
            family_terms: cfg.family_terms,
            counts: cfg.counts,
            alphas: &cfg.alphas,
            primes: match &cfg.primes {
                PrimeChoice::Auto => PrimesJson::Auto("auto"),
                PrimeChoice::List(l) => PrimesJson::List(l),
            },
            prime_bound: cfg.prime_bound,
            budget: cfg.budget,
        },
        checks: rows(results)
            .map(|(suite, r)| CheckJson {
                id: &r.id,
                suite,
                paper_label: &r.label,
                params: ParamsJson {
                    p: r.params.p,
                    alpha: r.params.alpha,
                    j_range: r.params.j_range.map(|(a, b)| [a, b]),
                    n_terms: r.params.n_terms,
                    order: r.params.order,
                    modulus: r.params.modulus,
                },
                status: r.status.as_str(),
                first_failure: r.first_failure.as_ref().map(|f| FailureJson {
                    n: f.n,
                    j: f.j,
                    index: f.index,
                    lhs: &f.lhs,
                    rhs: &f.rhs,
                }),
                note: r.note.as_deref(),
                elapsed_ms: r.elapsed_ms,
            })
            .collect(),
        summary: SummaryJson {
            pass: summary.pass,
            fail: summary.fail,
            skip: summary.skip,
            error: summary.error,
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    s.push('\n');
    s
}

fn tag(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skip => "SKIP",
        Status::Error => "ERROR",
    }
}

fn params_text(r: &VerificationReport) -> String {
    let p = &r.params;
    let mut parts = Vec::new();
    if let Some(v) = p.p {
        parts.push(format!("p={}", v));
    }
    if let Some(v) = p.alpha {
        parts.push(format!("alpha={}", v));
    }
    if let Some((a, b)) = p.j_range {
        parts.push(format!("j={}..{}", a, b));
    }
    if let Some(v) = p.n_terms {
        parts.push(format!("n<{}", v));
    }
    if let Some(v) = p.order {
        parts.push(format!("N={}", v));
    }
    if let Some(v) = p.modulus {
        parts.push(format!("mod {}", v));
    }
    parts.join(" ")
}

fn detail_text(r: &VerificationReport) -> String {
    let mut d = String::new();
    if let Some(f) = &r.first_failure {
        let _ = write!(d, "first failure at n={}", f.n);
        if let Some(j) = f.j {
            let _ = write!(d, " j={}", j);
        }
        if let Some(i) = f.index {
            let _ = write!(d, " (index {})", i);
        }
        let _ = write!(d, ": {} vs {}", f.lhs, f.rhs);
    }
    if let Some(n) = &r.note {
        if !d.is_empty() {
            d.push_str("; ");
        }
        d.push_str(n);
    }
    d
}

pub fn to_text(results: &[SuiteResult]) -> String {
    let width = rows(results).map(|(_, r)| r.id.len()).max().unwrap_or(0);
    let mut out = String::new();
    for s in results {
        let sum = s.summary();
        let _ = writeln!(
            out,
            "== {} ({} pass, {} fail, {} skip, {} error)",
            s.suite, sum.pass, sum.fail, sum.skip, sum.error
        );
        for r in &s.reports {
            let detail = detail_text(r);
            let _ = writeln!(
                out,
                "{:<5}  {:<width$}  {:<28}  {}{}{}",
                tag(r.status),
                r.id,
                r.label,
                params_text(r),
                if detail.is_empty() { "" } else { "  " },
                detail,
                width = width
            );
        }
    }
    let t = total_summary(results);
    let _ = writeln!(
        out,
        "total: {} pass, {} fail, {} skip, {} error",
        t.pass, t.fail, t.skip, t.error
    );
    out
}

pub fn to_csv(results: &[SuiteResult]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "id",
        "suite",
        "paper_label",
        "status",
        "p",
        "alpha",
        "j_min",
        "j_max",
        "n_terms",
        "order",
        "modulus",
        "fail_n",
        "fail_j",
        "fail_index",
        "lhs",
        "rhs",
        "note",
        "elapsed_ms",
    ])
    .expect("in-memory writer");
    let opt = |v: Option<String>| v.unwrap_or_default();
    for (suite, r) in rows(results) {
        let f = r.first_failure.as_ref();
        w.write_record([
            r.id.clone(),
            suite.to_string(),
            r.label.clone(),
            r.status.as_str().to_string(),
            opt(r.params.p.map(|v| v.to_string())),
            opt(r.params.alpha.map(|v| v.to_string())),
            opt(r.params.j_range.map(|v| v.0.to_string())),
            opt(r.params.j_range.map(|v| v.1.to_string())),
            opt(r.params.n_terms.map(|v| v.to_string())),
            opt(r.params.order.map(|v| v.to_string())),
            opt(r.params.modulus.map(|v| v.to_string())),
            opt(f.map(|f| f.n.to_string())),
            opt(f.and_then(|f| f.j).map(|v| v.to_string())),
            opt(f.and_then(|f| f.index).map(|v| v.to_string())),
            opt(f.map(|f| f.lhs.clone())),
            opt(f.map(|f| f.rhs.clone())),
            r.note.clone().unwrap_or_default(),
            opt(r.elapsed_ms.map(|v| v.to_string())),
        ])
        .expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

pub fn render(results: &[SuiteResult], cfg: &RunConfig, format: Format) -> String {
    match format {
        Format::Text => to_text(results),
        Format::Json => to_json(results, cfg),
        Format::Csv => to_csv(results),
    }
}

/// 0 when everything passed or was skipped, 1 on any failure, 2 when a
/// check was misconfigured.
pub fn exit_code(results: &[SuiteResult]) -> i32 {
    let t = total_summary(results);
    if t.error > 0 {
        2
    } else if t.fail > 0 {
        1
    } else {
        0
    }
}

/// Drops per-check and per-suite timings so runs can be compared byte for
/// byte.
pub fn without_timing(results: &mut [SuiteResult]) {
    for s in results {
        s.elapsed_ms = 0;
        for r in &mut s.reports {
            r.elapsed_ms = None;
        }
    }
}
