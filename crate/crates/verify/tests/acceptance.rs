//! One line per acceptance criterion, each run at exact tolerance.
//!
//! A criterion that fails only on the claims listed in `KNOWN_FALSE` is
//! reported as FAIL and does not abort the run; any other failure does, and
//! so does a listed claim that starts to pass.

use std::collections::BTreeSet;
use std::time::Instant;

use qseries_core::congruence::ClaimKind;
use qseries_core::partitions::{count_dp, count_exhaustive, PartitionConstraint};
use qseries_core::report::{Status, VerificationReport};
use qseries_verify::registry::Registry;
use qseries_verify::suites::{run_suite, PrimeChoice, RunConfig, Suite};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Claims that do not hold as printed, or strengthened claims that still hold.
const KNOWN_FALSE: &[&str] = &[
    "m/2n+1",
    "m/8n+1",
    "m/8pn+(p^2+2)/3",
    "t/n/3-dissection",
    "s/24n+3P",
    "s/24n+9/x2",
    "s/24n+15/x2",
    "s/24n+17/x2",
    "s/24n+23/x2",
    "s/24n+19P/x2",
];

struct Outcome {
    pass: bool,
    detail: String,
    unexpected: Vec<String>,
}

fn judge(reports: &[VerificationReport]) -> Outcome {
    let known: BTreeSet<&str> = KNOWN_FALSE.iter().copied().collect();
    let failing: Vec<&VerificationReport> =
        reports.iter().filter(|r| r.status != Status::Pass).collect();
    let mut unexpected: Vec<String> = failing
        .iter()
        .filter(|r| r.status != Status::Fail || !known.contains(r.id.as_str()))
        .map(|r| format!("{} ({})", r.id, r.status.as_str()))
        .collect();
    let ids: BTreeSet<&str> = reports.iter().map(|r| r.id.as_str()).collect();
    let failed: BTreeSet<&str> = failing.iter().map(|r| r.id.as_str()).collect();
    for id in known.intersection(&ids) {
        if !failed.contains(id) {
            unexpected.push(format!("{} now passes", id));
        }
    }
    let detail = if failing.is_empty() {
        format!("{} checks", reports.len())
    } else {
        format!(
            "{} of {} checks fail: {}",
            failing.len(),
            reports.len(),
            failing
                .iter()
                .map(|r| r.id.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )
    };
    Outcome {
        pass: failing.is_empty(),
        detail,
        unexpected,
    }
}

fn suite(s: Suite, cfg: &RunConfig) -> Vec<VerificationReport> {
    run_suite(s, &Registry::builtin(), cfg).reports
}

fn identities() -> Outcome {
    let cfg = RunConfig {
        order: 200,
        ..RunConfig::default()
    };
    judge(&suite(Suite::Identities, &cfg))
}

fn interpretations() -> Outcome {
    let cfg = RunConfig {
        counts: 500,
        ..RunConfig::default()
    };
    judge(&suite(Suite::Interpretations, &cfg))
}

fn lemmas() -> Outcome {
    let cfg = RunConfig {
        order: 300,
        prime_bound: 97,
        ..RunConfig::default()
    };
    judge(&suite(Suite::Lemmas, &cfg))
}

fn intermediates() -> Outcome {
    let cfg = RunConfig {
        order: 300,
        ..RunConfig::default()
    };
    judge(&suite(Suite::Intermediates, &cfg))
}

fn congruence_runs(kind_is_family: bool) -> Vec<VerificationReport> {
    let registry = Registry::builtin();
    let cfg = RunConfig {
        terms: 500,
        family_terms: 20,
        alphas: vec![0],
        primes: PrimeChoice::Auto,
        ..RunConfig::default()
    };
    let s = if kind_is_family {
        Suite::Families
    } else {
        Suite::Congruences
    };
    run_suite(s, &registry, &cfg)
        .reports
        .into_iter()
        .filter(|r| {
            let fam = registry
                .claim(&r.id)
                .map(|c| c.check.kind == ClaimKind::JFamily)
                .unwrap_or(false);
            fam == kind_is_family
        })
        .collect()
}

fn families_at_alpha_zero() -> Outcome {
    judge(&congruence_runs(false))
}

fn deep_families() -> Outcome {
    let reports = congruence_runs(true);
    let mut o = judge(&reports);
    let largest = reports.iter().filter_map(|r| r.params.order).max().unwrap_or(0);
    o.detail = format!("{}, largest series {} coefficients", o.detail, largest + 1);
    o
}

fn mutations() -> Outcome {
    let reports = suite(Suite::Mutations, &RunConfig::default());
    let mut o = judge(&reports);
    let eq29 = reports.iter().find(|r| r.id == "s/12n+1/x2");
    assert!(
        eq29.is_some_and(|r| r.status == Status::Pass),
        "the mod 32 mutant of s(12n+1) must be caught"
    );
    if !o.pass {
        o.detail.push_str(" (these strengthened congruences hold for n < 500)");
    }
    o
}

fn oracle_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut mismatches = Vec::new();
    let mut done = 0;
    while done < 100 {
        let modulus = rng.gen_range(1..=10u32);
        let colours: Vec<u8> = (0..modulus).map(|_| rng.gen_range(0..=3u8)).collect();
        let overlined = rng.gen_bool(0.5);
        let Ok(c) = PartitionConstraint::new(modulus, colours.clone(), overlined) else {
            continue;
        };
        done += 1;
        let dp = count_dp(&c, 25);
        for n in 0..=25 {
            if *dp.get(n) != count_exhaustive(&c, n).unwrap() {
                mismatches.push(format!("{:?} overlined={} n={}", colours, overlined, n));
                break;
            }
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!("{} constraints, n <= 25", done),
        unexpected: mismatches,
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("identity suite", identities),
        ("interpretation suite", interpretations),
        ("lemma suite", lemmas),
        ("intermediate-step suite", intermediates),
        ("congruence families at alpha = 0", families_at_alpha_zero),
        ("deep-family spot checks", deep_families),
        ("mutation sanity", mutations),
        ("oracle independence", oracle_independence),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        println!(
            "criterion {}: {} {} ({}; {:.1} s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail,
            start.elapsed().as_secs_f64()
        );
        unexpected.extend(o.unexpected.into_iter().map(|u| format!("criterion {}: {}", i + 1, u)));
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes:\n{}", unexpected.join("\n"));
        std::process::exit(1);
    }
}
