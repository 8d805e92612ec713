//! Verification suites: each turns registry records or built-in checks into
//! a list of reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use qseries_core::arith::{is_prime, primes_between};
use qseries_core::congruence::{
    exact_modular_agreement, g3_solutions, g3_unique, CheckPlan, ClaimKind, CongruenceCheck,
    PrimeCondition,
};
use qseries_core::dissection::{
    excluded_t, l1_residue_clash, psi_residue_clash, verify_2_3_dissections,
    verify_binomial_congruences, verify_expr_identity, verify_l1_dissection,
    verify_psi_dissection,
};
use qseries_core::named::{named_series, NamedSeries, SeriesName, ALL_SERIES};
use qseries_core::partitions::{count_dp, count_exhaustive, PartitionConstraint, EXHAUSTIVE_LIMIT};
use qseries_core::report::{FirstFailure, Params, Status, VerificationReport};
use qseries_core::series::{Ring, TruncatedSeries};
use rayon::prelude::*;

use crate::registry::{ClaimSuite, Reading, Registry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Identities,
    Interpretations,
    Lemmas,
    Intermediates,
    Congruences,
    Families,
    Mutations,
    Agreement,
    Corrections,
}

impl Suite {
    /// What `--suite all` runs. `families` is a subset of `congruences`.
    pub const ALL: [Suite; 8] = [
        Suite::Identities,
        Suite::Interpretations,
        Suite::Lemmas,
        Suite::Intermediates,
        Suite::Congruences,
        Suite::Mutations,
        Suite::Agreement,
        Suite::Corrections,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Interpretations => "interpretations",
            Suite::Lemmas => "lemmas",
            Suite::Intermediates => "intermediates",
            Suite::Congruences => "congruences",
            Suite::Families => "families",
            Suite::Mutations => "mutations",
            Suite::Agreement => "agreement",
            Suite::Corrections => "corrections",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .iter()
            .chain(std::iter::once(&Suite::Families))
            .find(|x| x.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown suite '{}'", s))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeChoice {
    /// The smallest admitted prime of each claim.
    Auto,
    List(Vec<u64>),
}

impl FromStr for PrimeChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(PrimeChoice::Auto);
        }
        let list = s
            .split(',')
            .map(|t| {
                let p: u64 = t
                    .trim()
                    .parse()
                    .map_err(|_| format!("'{}' is not a prime", t))?;
                if is_prime(p) {
                    Ok(p)
                } else {
                    Err(format!("{} is not prime", p))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PrimeChoice::List(list))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    /// Truncation order for identities, lemmas and proof steps.
    pub order: usize,
    /// Terms per progression for plain and alpha-indexed claims.
    pub terms: usize,
    /// Terms per progression for j-families.
    pub family_terms: usize,
    /// Largest n for partition counts.
    pub counts: usize,
    pub alphas: Vec<u32>,
    pub primes: PrimeChoice,
    pub prime_bound: u64,
    /// Largest series (in coefficients) a claim may build.
    pub budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            order: 300,
            terms: 500,
            family_terms: 20,
            counts: 500,
            alphas: vec![0],
            primes: PrimeChoice::Auto,
            prime_bound: 100,
            budget: 4_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub suite: Suite,
    pub reports: Vec<VerificationReport>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub error: usize,
}

impl Summary {
    pub fn of<'a>(reports: impl IntoIterator<Item = &'a VerificationReport>) -> Summary {
        let mut s = Summary::default();
        for r in reports {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Skip => s.skip += 1,
                Status::Error => s.error += 1,
            }
        }
        s
    }
}

impl SuiteResult {
    pub fn summary(&self) -> Summary {
        Summary::of(&self.reports)
    }
}

pub fn run_suite(suite: Suite, registry: &Registry, cfg: &RunConfig) -> SuiteResult {
    let start = Instant::now();
    let mut reports = match suite {
        Suite::Identities => identities(registry, cfg),
        Suite::Interpretations => interpretations(cfg),
        Suite::Lemmas => lemmas(cfg),
        Suite::Intermediates => claims(registry, cfg, |c| {
            c.suite == ClaimSuite::Intermediates
        }),
        Suite::Congruences => claims(registry, cfg, |c| c.suite == ClaimSuite::Congruences),
        Suite::Families => claims(registry, cfg, |c| {
            c.suite == ClaimSuite::Congruences && c.check.kind == ClaimKind::JFamily
        }),
        Suite::Corrections => claims(registry, cfg, |c| c.reading == Reading::Corrected),
        Suite::Mutations => mutations(registry, cfg),
        Suite::Agreement => agreement(registry, cfg),
    };
    reports.sort_by(|a, b| {
        (&a.id, a.params.p, a.params.alpha).cmp(&(&b.id, b.params.p, b.params.alpha))
    });
    SuiteResult {
        suite,
        reports,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

fn timed(f: impl FnOnce() -> VerificationReport) -> VerificationReport {
    let start = Instant::now();
    let mut r = f();
    r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    r
}

fn compare(
    id: &str,
    label: &str,
    params: Params,
    lhs: &TruncatedSeries,
    rhs: &TruncatedSeries,
) -> VerificationReport {
    match lhs.first_difference(rhs).expect("same ring") {
        None => VerificationReport::pass(id, label, params),
        Some(n) => VerificationReport::fail(
            id,
            label,
            params,
            FirstFailure {
                n,
                j: None,
                index: Some(n as u64),
                lhs: lhs.coeff(n).to_string(),
                rhs: rhs.coeff(n).to_string(),
            },
        ),
    }
}

fn order_params(order: usize) -> Params {
    Params {
        order: Some(order),
        ..Params::default()
    }
}

fn identities(registry: &Registry, cfg: &RunConfig) -> Vec<VerificationReport> {
    let order = cfg.order;
    let mut out: Vec<VerificationReport> = ALL_SERIES
        .par_iter()
        .map(|&name| {
            timed(|| {
                let ns = NamedSeries::get(name);
                let id = format!("series/{}", name);
                let label = format!("{}: sum side = product side = eta quotient", name);
                let sides = (
                    ns.sum_side_series(Ring::Exact, order),
                    ns.product_side_series(Ring::Exact, order),
                    ns.eta_form_series(Ring::Exact, order),
                );
                let (sum, prod, eta) = match sides {
                    (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                    (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                        return VerificationReport::error(
                            &id,
                            &label,
                            order_params(order),
                            e.to_string(),
                        )
                    }
                };
                let parts = [
                    compare(&id, "sum vs product", order_params(order), &sum, &prod),
                    compare(&id, "product vs eta", order_params(order), &prod, &eta),
                ];
                VerificationReport::combine(&id, &label, order_params(order), &parts)
            })
        })
        .collect();
    out.par_extend(registry.identities.par_iter().map(|r| {
        timed(|| {
            let ring = match r.modulus {
                None => Ring::Exact,
                Some(m) => Ring::from_modulus(m).expect("validated modulus"),
            };
            verify_expr_identity(&r.id, &r.paper_label, &r.lhs, &r.rhs, ring, order)
        })
    }));
    out
}

fn interpretations(cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut cases: Vec<(String, PartitionConstraint, SeriesName)> = [2, 3, 4]
        .iter()
        .map(|&k| {
            (
                format!("g{}", k),
                PartitionConstraint::overpartitions_gk(k),
                SeriesName::G(k),
            )
        })
        .collect();
    cases.push(("h".into(), PartitionConstraint::h_partitions(), SeriesName::H));
    let limit = cfg.counts;
    cases
        .par_iter()
        .flat_map(|(name, c, series)| {
            let table = count_dp(c, limit);
            let counts = TruncatedSeries::from_bigints(Ring::Exact, table.to_bigints());
            let ns = NamedSeries::get(*series);
            let params = order_params(limit);
            let mut out = Vec::new();
            for (form, value) in [
                ("product", ns.product_side_series(Ring::Exact, limit)),
                ("eta", ns.eta_form_series(Ring::Exact, limit)),
            ] {
                let id = format!("partitions/{}/dp={}", name, form);
                let label = format!("{} counts equal the {} form", name, form);
                out.push(timed(|| match value {
                    Ok(s) => compare(&id, &label, params.clone(), &counts, &s),
                    Err(e) => VerificationReport::error(&id, &label, params.clone(), e.to_string()),
                }));
            }
            let id = format!("partitions/{}/dp=exhaustive", name);
            let label = format!("{} counts by table and by enumeration", name);
            out.push(timed(|| {
                let top = EXHAUSTIVE_LIMIT.min(limit);
                let params = order_params(top);
                for n in 0..=top {
                    let brute = count_exhaustive(c, n).expect("within the limit");
                    if &brute != table.get(n) {
                        return VerificationReport::fail(
                            &id,
                            &label,
                            params,
                            FirstFailure {
                                n,
                                j: None,
                                index: Some(n as u64),
                                lhs: table.get(n).to_string(),
                                rhs: brute.to_string(),
                            },
                        );
                    }
                }
                VerificationReport::pass(&id, &label, params)
            }));
            out
        })
        .collect()
}

const PSI_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];
const L1_PRIMES: [u64; 4] = [5, 7, 11, 13];
pub const SCAN_BOUND: u64 = 97;

fn lemmas(cfg: &RunConfig) -> Vec<VerificationReport> {
    let order = cfg.order;
    let (psi_primes, l1_primes): (Vec<u64>, Vec<u64>) = match &cfg.primes {
        PrimeChoice::Auto => (PSI_PRIMES.to_vec(), L1_PRIMES.to_vec()),
        PrimeChoice::List(l) => (
            l.iter().copied().filter(|&p| p % 2 == 1).collect(),
            l.iter().copied().filter(|&p| p >= 5).collect(),
        ),
    };
    let mut jobs: Vec<Box<dyn Fn() -> Vec<VerificationReport> + Send + Sync>> = Vec::new();
    for p in psi_primes {
        jobs.push(Box::new(move || {
            vec![dissection_report(
                &format!("psi-dissection/p={}", p),
                "p-dissection of psi(q)",
                p,
                order,
                verify_psi_dissection(p, order),
            )]
        }));
    }
    for p in l1_primes {
        jobs.push(Box::new(move || {
            vec![dissection_report(
                &format!("l1-dissection/p={}", p),
                "p-dissection of l1",
                p,
                order,
                verify_l1_dissection(p, order),
            )]
        }));
    }
    jobs.push(Box::new(move || verify_2_3_dissections(order)));
    for k in 1..=6 {
        for m in 1..=4 {
            jobs.push(Box::new(move || {
                vec![verify_binomial_congruences(k, m, order)]
            }));
        }
    }
    jobs.push(Box::new(|| vec![residue_scan()]));
    jobs.push(Box::new(|| vec![g3_scan()]));
    jobs.par_iter()
        .flat_map(|job| {
            let start = Instant::now();
            let mut out = job();
            let ms = start.elapsed().as_millis() as u64;
            for r in &mut out {
                r.elapsed_ms = Some(ms);
            }
            out
        })
        .collect()
}

fn dissection_report(
    id: &str,
    label: &str,
    p: u64,
    order: usize,
    r: Result<VerificationReport, qseries_core::dissection::DissectionError>,
) -> VerificationReport {
    r.unwrap_or_else(|e| {
        VerificationReport::error(
            id,
            label,
            Params {
                p: Some(p),
                order: Some(order),
                ..Params::default()
            },
            e.to_string(),
        )
    })
}

/// Residue avoidance for both dissections at every prime up to the bound.
pub fn residue_scan() -> VerificationReport {
    let id = format!("dissection-residues/p<={}", SCAN_BOUND);
    let label = "tail residue avoids every head residue";
    let params = Params::default();
    for p in primes_between(3, SCAN_BOUND) {
        let psi = psi_residue_clash(p).expect("odd prime");
        let l1 = if p >= 5 {
            l1_residue_clash(p).expect("prime >= 5")
        } else {
            None
        };
        if let Some((which, t)) = psi.map(|t| ("psi", t)).or(l1.map(|t| ("l1", t))) {
            return VerificationReport::fail(
                &id,
                label,
                Params {
                    p: Some(p),
                    ..params
                },
                FirstFailure {
                    n: 0,
                    j: None,
                    index: None,
                    lhs: format!("{} head at t = {}", which, t),
                    rhs: "tail residue".into(),
                },
            );
        }
    }
    VerificationReport::pass(&id, label, params)
}

/// The quadratic congruence behind the (-8/p) family has only the
/// diagonal solution at every admitted prime up to the bound.
pub fn g3_scan() -> VerificationReport {
    let id = format!("g3-unique-solution/p<={}", SCAN_BOUND);
    let label = "(6t+1)^2 + 8(6m+1)^2 = 0 mod p only at t = m = (+-p-1)/6";
    let cond = PrimeCondition::Legendre { min_p: 5, xi: -8 };
    for p in cond.admissible_primes(SCAN_BOUND) {
        if !g3_unique(p) {
            let s = excluded_t(p);
            return VerificationReport::fail(
                &id,
                label,
                Params {
                    p: Some(p),
                    ..Params::default()
                },
                FirstFailure {
                    n: 0,
                    j: None,
                    index: None,
                    lhs: format!("{:?}", g3_solutions(p)),
                    rhs: format!("[({}, {})]", s, s),
                },
            );
        }
    }
    VerificationReport::pass(&id, label, Params::default())
}

#[derive(Clone, Debug)]
struct Job {
    check: CongruenceCheck,
    plan: CheckPlan,
}

/// Expands a claim into (prime, alpha) instances, each either a runnable
/// plan or an immediate report.
fn instances(
    check: &CongruenceCheck,
    n_terms: usize,
    cfg: &RunConfig,
) -> Vec<Result<Job, VerificationReport>> {
    let primes: Vec<Option<u64>> = match (check.prime, &cfg.primes) {
        (None, _) => vec![None],
        (Some(cond), PrimeChoice::Auto) => match cond.smallest(cfg.prime_bound) {
            Some(p) => vec![Some(p)],
            None => {
                return vec![Err(VerificationReport::error(
                    &check.id,
                    &check.label,
                    Params::default(),
                    format!("no prime up to {} satisfies: {}", cfg.prime_bound, cond),
                ))]
            }
        },
        (Some(cond), PrimeChoice::List(list)) => {
            let ps: Vec<Option<u64>> = list
                .iter()
                .copied()
                .filter(|&p| cond.admits(p))
                .map(Some)
                .collect();
            if ps.is_empty() {
                return vec![Err(VerificationReport::skip(
                    &check.id,
                    &check.label,
                    Params::default(),
                    format!("no listed prime satisfies: {}", cond),
                ))];
            }
            ps
        }
    };
    let alphas: Vec<u32> = if check.prime.is_none() {
        vec![0]
    } else {
        cfg.alphas.clone()
    };
    let mut out = Vec::new();
    for p in primes {
        for &alpha in &alphas {
            if let (Some(max), Some(_)) = (check.max_alpha, p) {
                if alpha > max {
                    out.push(Err(VerificationReport::skip(
                        &check.id,
                        &check.label,
                        Params {
                            p,
                            alpha: Some(alpha),
                            ..Params::default()
                        },
                        format!("stated for alpha <= {} only", max),
                    )));
                    continue;
                }
            }
            out.push(match check.plan(p, alpha, n_terms) {
                Ok(plan) if plan.order > cfg.budget => {
                    Err(check.over_budget(&plan, cfg.budget))
                }
                Ok(plan) => Ok(Job {
                    check: check.clone(),
                    plan,
                }),
                Err(e) => Err(check.config_error(p, alpha, n_terms, e)),
            });
        }
    }
    out
}

/// Builds each (series, ring) once at the largest order any job needs, then
/// runs the jobs against the shared series.
fn run_jobs(jobs: Vec<Job>) -> Vec<VerificationReport> {
    let mut needed: BTreeMap<(SeriesName, Ring), usize> = BTreeMap::new();
    for j in &jobs {
        let slot = needed.entry((j.check.series, j.plan.ring)).or_insert(0);
        *slot = (*slot).max(j.plan.order);
    }
    let cache: BTreeMap<(SeriesName, Ring), TruncatedSeries> = needed
        .into_par_iter()
        .map(|((name, ring), order)| ((name, ring), named_series(name, ring, order)))
        .collect();
    jobs.par_iter()
        .map(|j| {
            let base = &cache[&(j.check.series, j.plan.ring)];
            timed(|| j.check.run(&j.plan, base))
        })
        .collect()
}

fn n_terms_for(check: &CongruenceCheck, suite: ClaimSuite, cfg: &RunConfig) -> usize {
    match (check.kind, suite) {
        (ClaimKind::JFamily, _) => cfg.family_terms,
        (_, ClaimSuite::Intermediates) => cfg.order + 1,
        _ => cfg.terms,
    }
}

fn claims(
    registry: &Registry,
    cfg: &RunConfig,
    select: impl Fn(&crate::registry::Claim) -> bool,
) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let mut jobs = Vec::new();
    for c in registry.claims.iter().filter(|c| select(c)) {
        for inst in instances(&c.check, n_terms_for(&c.check, c.suite, cfg), cfg) {
            match inst {
                Ok(job) => jobs.push(job),
                Err(report) => out.push(report),
            }
        }
    }
    out.extend(run_jobs(jobs));
    out
}

fn mutation_targets(registry: &Registry) -> impl Iterator<Item = &CongruenceCheck> {
    registry
        .claims
        .iter()
        .filter(|c| {
            c.suite == ClaimSuite::Congruences
                && c.check.kind != ClaimKind::JFamily
                && c.check.modulus.is_some()
        })
        .map(|c| &c.check)
}

/// Doubles the modulus of every non-family claim; each mutant must fail.
fn mutations(registry: &Registry, cfg: &RunConfig) -> Vec<VerificationReport> {
    let mut out = Vec::new();
    let mut jobs = Vec::new();
    let single = RunConfig {
        alphas: vec![0],
        ..cfg.clone()
    };
    for check in mutation_targets(registry) {
        let mutant = check.strengthened();
        for inst in instances(&mutant, cfg.terms, &single) {
            match inst {
                Ok(job) => jobs.push(job),
                Err(report) => out.push(report),
            }
        }
    }
    for r in run_jobs(jobs) {
        let mut flipped = match r.status {
            Status::Fail => {
                let f = r.first_failure.clone().expect("failures carry a position");
                VerificationReport::pass(&r.id, &r.label, r.params.clone()).with_note(format!(
                    "mutant rejected at n = {} (index {}): {} vs {}",
                    f.n,
                    f.index.unwrap_or(0),
                    f.lhs,
                    f.rhs
                ))
            }
            Status::Pass => VerificationReport::fail(
                &r.id,
                &r.label,
                r.params.clone(),
                FirstFailure {
                    n: r.params.n_terms.unwrap_or(0),
                    j: None,
                    index: None,
                    lhs: "mutant holds".into(),
                    rhs: "expected a violation".into(),
                },
            ),
            _ => r.clone(),
        };
        flipped.elapsed_ms = r.elapsed_ms;
        out.push(flipped);
    }
    out
}

pub const AGREEMENT_TERMS: usize = 100;

/// Native residue-ring verdicts against exact arithmetic reduced afterwards.
fn agreement(registry: &Registry, cfg: &RunConfig) -> Vec<VerificationReport> {
    let targets: Vec<(CongruenceCheck, Option<u64>)> = mutation_targets(registry)
        .map(|c| {
            let p = c.prime.and_then(|cond| cond.smallest(cfg.prime_bound));
            (c.clone(), p)
        })
        .collect();
    targets
        .par_iter()
        .map(|(c, p)| timed(|| exact_modular_agreement(c, *p, 0, AGREEMENT_TERMS)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("families".parse::<Suite>().unwrap(), Suite::Families);
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn prime_lists_parse() {
        assert_eq!("auto".parse::<PrimeChoice>().unwrap(), PrimeChoice::Auto);
        assert_eq!(
            "3, 5,7".parse::<PrimeChoice>().unwrap(),
            PrimeChoice::List(vec![3, 5, 7])
        );
        assert!("3,9".parse::<PrimeChoice>().is_err());
        assert!("x".parse::<PrimeChoice>().is_err());
    }

    #[test]
    fn scans_pass() {
        assert!(residue_scan().is_pass());
        assert!(g3_scan().is_pass());
    }
}
