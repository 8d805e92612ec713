//! Congruence claims on named series: vanishing on arithmetic progressions,
//! progression extracts congruent to an expression, and j-indexed families.
//!
//! Indices, with `P = p^(2 alpha)`:
//!
//! ```text
//! ap-vanishing       c(a n + v / w)
//! series-congruence  c(a P p^s n + (u P p^o + v) / w)  vs  rhs
//! j-family           c(a P p^2 n + a P p j + (u P p^2 + v) / w),  1 <= j <= p - 1
//! ```
//!
//! where `s` and `o` are the extra stride and offset powers of a claim
//! (both 0 for the theorem statements).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{is_prime, legendre};
use crate::dissection::excluded_t;
use crate::expr::{parse_qexpr, EvalError, Evaluator, ParseError, QExpr};
use crate::named::{named_series, SeriesName};
use crate::report::{FirstFailure, Params, VerificationReport};
use crate::series::{Ring, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeCondition {
    Any { min_p: u64 },
    /// `(xi/p) = -1`.
    Legendre { min_p: u64, xi: i64 },
}

impl PrimeCondition {
    pub fn min_p(&self) -> u64 {
        match *self {
            PrimeCondition::Any { min_p } | PrimeCondition::Legendre { min_p, .. } => min_p,
        }
    }

    pub fn admits(&self, p: u64) -> bool {
        if p < self.min_p() || p.is_multiple_of(2) || !is_prime(p) {
            return false;
        }
        match *self {
            PrimeCondition::Any { .. } => true,
            PrimeCondition::Legendre { xi, .. } => legendre(xi, p) == Ok(-1),
        }
    }

    pub fn admissible_primes(&self, bound: u64) -> Vec<u64> {
        (self.min_p()..=bound).filter(|&p| self.admits(p)).collect()
    }

    pub fn smallest(&self, bound: u64) -> Option<u64> {
        (self.min_p()..=bound).find(|&p| self.admits(p))
    }
}

impl fmt::Display for PrimeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeCondition::Any { min_p } => write!(f, "prime p >= {}", min_p),
            PrimeCondition::Legendre { min_p, xi } => {
                write!(f, "prime p >= {} with ({}/p) = -1", min_p, xi)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimKind {
    ApVanishing,
    SeriesCongruence,
    JFamily,
}

impl ClaimKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimKind::ApVanishing => "ap-vanishing",
            ClaimKind::SeriesCongruence => "series-congruence",
            ClaimKind::JFamily => "j-family",
        }
    }
}

/// `(u P + v) / w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Offset {
    pub u: i64,
    pub v: i64,
    pub w: i64,
}

impl Offset {
    pub const fn new(u: i64, v: i64, w: i64) -> Self {
        Offset { u, v, w }
    }

    pub fn eval(&self, big_p: u64) -> Result<u64, ConfigError> {
        let num = (self.u as i128) * (big_p as i128) + self.v as i128;
        let w = self.w as i128;
        if w <= 0 || num % w != 0 {
            return Err(ConfigError::NonIntegralOffset {
                offset: *self,
                big_p,
            });
        }
        let value = num / w;
        u64::try_from(value).map_err(|_| ConfigError::NegativeOffset {
            offset: *self,
            big_p,
        })
    }
}

impl fmt::Display for Offset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}P + {})/{}", self.u, self.v, self.w)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigError {
    NonIntegralOffset { offset: Offset, big_p: u64 },
    NegativeOffset { offset: Offset, big_p: u64 },
    PrimeNotAdmitted { p: u64, condition: PrimeCondition },
    PrimeRequired,
    NoAdmissiblePrime { condition: PrimeCondition, bound: u64 },
    AlphaNotAllowed { alpha: u32, max: u32 },
    JOutOfRange { j: u64, p: u64 },
    MissingRhs,
    Rhs(ParseError),
    InvalidModulus(u64),
    Overflow,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::NonIntegralOffset { offset, big_p } => {
                write!(f, "offset {} is not an integer at P = {}", offset, big_p)
            }
            ConfigError::NegativeOffset { offset, big_p } => {
                write!(f, "offset {} is negative at P = {}", offset, big_p)
            }
            ConfigError::PrimeNotAdmitted { p, condition } => {
                write!(f, "{} does not satisfy: {}", p, condition)
            }
            ConfigError::PrimeRequired => f.write_str("this claim needs a prime"),
            ConfigError::NoAdmissiblePrime { condition, bound } => {
                write!(f, "no prime up to {} satisfies: {}", bound, condition)
            }
            ConfigError::AlphaNotAllowed { alpha, max } => {
                write!(f, "alpha = {} exceeds the stated range (max {})", alpha, max)
            }
            ConfigError::JOutOfRange { j, p } => write!(f, "j = {} outside 1..={}", j, p - 1),
            ConfigError::MissingRhs => f.write_str("series congruence without a right side"),
            ConfigError::Rhs(e) => write!(f, "right side: {}", e),
            ConfigError::InvalidModulus(m) => write!(f, "modulus {} is not a power of two", m),
            ConfigError::Overflow => f.write_str("index arithmetic overflows"),
        }
    }
}

/// One claim. `modulus = None` means exact equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceCheck {
    pub id: String,
    pub label: String,
    pub series: SeriesName,
    pub kind: ClaimKind,
    pub stride: u64,
    pub offset: Offset,
    pub stride_pow: u32,
    pub offset_pow: u32,
    pub modulus: Option<u64>,
    /// Expression text; `{p}`, `{Kp}` (K times p) and `{eps}` (the sign
    /// `(-1)^((±p-1)/6)`) are filled in per prime.
    pub rhs: Option<String>,
    pub prime: Option<PrimeCondition>,
    pub max_alpha: Option<u32>,
}

/// Everything fixed before a series is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckPlan {
    pub ring: Ring,
    pub order: usize,
    pub p: Option<u64>,
    pub alpha: u32,
    pub n_terms: usize,
    /// (j, stride, offset) per progression; j is 0 outside families.
    pub progressions: Vec<(u64, u64, u64)>,
    pub rhs: Option<QExpr>,
}

impl CongruenceCheck {
    pub fn ring(&self) -> Result<Ring, ConfigError> {
        match self.modulus {
            None => Ok(Ring::Exact),
            Some(m) => Ring::from_modulus(m).map_err(|_| ConfigError::InvalidModulus(m)),
        }
    }

    /// The same claim with its modulus doubled.
    pub fn strengthened(&self) -> CongruenceCheck {
        let mut c = self.clone();
        c.id = format!("{}/x2", self.id);
        c.modulus = self.modulus.map(|m| 2 * m);
        c
    }

    pub fn rhs_text(&self, p: Option<u64>) -> Option<String> {
        self.rhs.as_ref().map(|t| fill_template(t, p))
    }

    /// Index of the n-th term of progression `j` in a family.
    pub fn family_index(&self, p: u64, alpha: u32, j: u64, n: u64) -> Result<u64, ConfigError> {
        if j == 0 || j >= p {
            return Err(ConfigError::JOutOfRange { j, p });
        }
        let (stride, off) = self.family_progression(p, alpha, j)?;
        stride
            .checked_mul(n)
            .and_then(|x| x.checked_add(off))
            .ok_or(ConfigError::Overflow)
    }

    fn family_progression(&self, p: u64, alpha: u32, j: u64) -> Result<(u64, u64), ConfigError> {
        let pp = pow(p, 2 * alpha + 2)?;
        let stride = mul(self.stride, pp)?;
        let step = mul(self.stride, pow(p, 2 * alpha + 1)?)?;
        let off = self.offset.eval(pp)?;
        Ok((stride, add(mul(step, j)?, off)?))
    }

    pub fn plan(&self, p: Option<u64>, alpha: u32, n_terms: usize) -> Result<CheckPlan, ConfigError> {
        let ring = self.ring()?;
        if let (Some(max), true) = (self.max_alpha, self.prime.is_some()) {
            if alpha > max {
                return Err(ConfigError::AlphaNotAllowed { alpha, max });
            }
        }
        let p = match self.prime {
            None => None,
            Some(cond) => {
                let p = p.ok_or(ConfigError::PrimeRequired)?;
                if !cond.admits(p) {
                    return Err(ConfigError::PrimeNotAdmitted { p, condition: cond });
                }
                Some(p)
            }
        };
        let alpha = if p.is_some() { alpha } else { 0 };
        let mut progressions = Vec::new();
        match self.kind {
            ClaimKind::ApVanishing => {
                progressions.push((0, self.stride, self.offset.eval(1)?));
            }
            ClaimKind::SeriesCongruence => {
                let (stride, off) = match p {
                    None => (self.stride, self.offset.eval(1)?),
                    Some(p) => {
                        let big_p = pow(p, 2 * alpha)?;
                        (
                            mul(mul(self.stride, big_p)?, pow(p, self.stride_pow)?)?,
                            self.offset.eval(mul(big_p, pow(p, self.offset_pow)?)?)?,
                        )
                    }
                };
                progressions.push((0, stride, off));
            }
            ClaimKind::JFamily => {
                let p = p.ok_or(ConfigError::PrimeRequired)?;
                for j in 1..p {
                    let (stride, off) = self.family_progression(p, alpha, j)?;
                    progressions.push((j, stride, off));
                }
            }
        }
        let rhs = match self.kind {
            ClaimKind::SeriesCongruence => {
                let text = self.rhs_text(p).ok_or(ConfigError::MissingRhs)?;
                Some(parse_qexpr(&text).map_err(ConfigError::Rhs)?)
            }
            _ => None,
        };
        let mut order = 0u64;
        let last = n_terms.saturating_sub(1) as u64;
        for &(_, stride, off) in &progressions {
            order = order.max(add(mul(stride, last)?, off)?);
        }
        Ok(CheckPlan {
            ring,
            order: usize::try_from(order).map_err(|_| ConfigError::Overflow)?,
            p,
            alpha,
            n_terms,
            progressions,
            rhs,
        })
    }

    pub fn params(&self, plan: &CheckPlan) -> Params {
        Params {
            p: plan.p,
            alpha: plan.p.map(|_| plan.alpha),
            j_range: match (self.kind, plan.p) {
                (ClaimKind::JFamily, Some(p)) => Some((1, p - 1)),
                _ => None,
            },
            n_terms: Some(plan.n_terms),
            order: Some(plan.order),
            modulus: self.modulus,
        }
    }

    /// Runs a plan against `base`, the named series in any ring at least as
    /// fine as the claim's, to order at least `plan.order`.
    pub fn run(&self, plan: &CheckPlan, base: &TruncatedSeries) -> VerificationReport {
        let params = self.params(plan);
        if base.order() < plan.order {
            return VerificationReport::error(
                &self.id,
                &self.label,
                params,
                format!(
                    "series order {} is below the required {}",
                    base.order(),
                    plan.order
                ),
            );
        }
        let base = match reduce_to(base, plan.ring) {
            Ok(b) => b,
            Err(e) => return VerificationReport::error(&self.id, &self.label, params, e),
        };
        let last = plan.n_terms.saturating_sub(1);
        let rhs = match &plan.rhs {
            None => TruncatedSeries::zero(plan.ring, last),
            Some(e) => match Evaluator::new(plan.ring, last).eval(e) {
                Ok(s) => s,
                Err(e) => {
                    return VerificationReport::error(
                        &self.id,
                        &self.label,
                        params,
                        eval_note(&e),
                    )
                }
            },
        };
        if plan.n_terms == 0 {
            return VerificationReport::pass(&self.id, &self.label, params);
        }
        for &(j, stride, off) in &plan.progressions {
            let lhs = base
                .progression(stride as usize, off as usize)
                .expect("positive stride")
                .truncate(last);
            if let Some(n) = lhs.first_difference(&rhs).expect("same ring") {
                let failure = FirstFailure {
                    n,
                    j: if self.kind == ClaimKind::JFamily {
                        Some(j)
                    } else {
                        None
                    },
                    index: Some(stride * n as u64 + off),
                    lhs: lhs.coeff(n).to_string(),
                    rhs: rhs.coeff(n).to_string(),
                };
                return VerificationReport::fail(&self.id, &self.label, params, failure);
            }
        }
        VerificationReport::pass(&self.id, &self.label, params)
    }

    /// Plans, builds the series (unless it would exceed `budget`
    /// coefficients) and runs.
    pub fn check(
        &self,
        p: Option<u64>,
        alpha: u32,
        n_terms: usize,
        budget: usize,
    ) -> VerificationReport {
        let plan = match self.plan(p, alpha, n_terms) {
            Ok(plan) => plan,
            Err(e) => return self.config_error(p, alpha, n_terms, e),
        };
        if plan.order > budget {
            return self.over_budget(&plan, budget);
        }
        let base = named_series(self.series, plan.ring, plan.order);
        self.run(&plan, &base)
    }

    pub fn over_budget(&self, plan: &CheckPlan, budget: usize) -> VerificationReport {
        VerificationReport::skip(
            &self.id,
            &self.label,
            self.params(plan),
            format!(
                "needs {} coefficients, budget is {}",
                plan.order + 1,
                budget
            ),
        )
    }

    pub fn config_error(
        &self,
        p: Option<u64>,
        alpha: u32,
        n_terms: usize,
        e: ConfigError,
    ) -> VerificationReport {
        VerificationReport::error(
            &self.id,
            &self.label,
            Params {
                p,
                alpha: Some(alpha),
                n_terms: Some(n_terms),
                modulus: self.modulus,
                ..Params::default()
            },
            e.to_string(),
        )
    }
}

fn eval_note(e: &EvalError) -> String {
    format!("right side: {}", e)
}

fn reduce_to(base: &TruncatedSeries, ring: Ring) -> Result<TruncatedSeries, String> {
    match (base.ring(), ring) {
        (a, b) if a == b => Ok(base.clone()),
        (_, Ring::Mod2k(bits)) => base.reduce_mod(bits).map_err(|e| e.to_string()),
        (from, to) => Err(format!("cannot compare a {} series in the {} ring", from, to)),
    }
}

fn pow(p: u64, e: u32) -> Result<u64, ConfigError> {
    p.checked_pow(e).ok_or(ConfigError::Overflow)
}

fn mul(a: u64, b: u64) -> Result<u64, ConfigError> {
    a.checked_mul(b).ok_or(ConfigError::Overflow)
}

fn add(a: u64, b: u64) -> Result<u64, ConfigError> {
    a.checked_add(b).ok_or(ConfigError::Overflow)
}

/// Fills `{p}`, `{Kp}` and `{eps}` in an expression template.
pub fn fill_template(template: &str, p: Option<u64>) -> String {
    let mut out = String::new();
    let mut rest = template;
    while let Some(start) = rest.find('{') {
        out.push_str(&rest[..start]);
        let end = match rest[start..].find('}') {
            Some(e) => start + e,
            None => break,
        };
        let key = &rest[start + 1..end];
        let filled = match (key, p) {
            ("eps", Some(p)) => Some(if excluded_t(p).rem_euclid(2) == 0 { "1" } else { "-1" }.into()),
            (k, Some(p)) if k.ends_with('p') => {
                let coeff = &k[..k.len() - 1];
                if coeff.is_empty() {
                    Some(p.to_string())
                } else {
                    coeff.parse::<u64>().ok().map(|c| (c * p).to_string())
                }
            }
            _ => None,
        };
        match filled {
            Some(v) => out.push_str(&v),
            None => out.push_str(&rest[start..=end]),
        }
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    out
}

/// All `(t, m)` in the lemma's index range with
/// `(6t+1)^2 + 8(6m+1)^2 ≡ 0 (mod p)`.
pub fn g3_solutions(p: u64) -> Vec<(i64, i64)> {
    let pi = p as i64;
    let range = -(pi - 1) / 2..=(pi - 1) / 2;
    let mut out = Vec::new();
    for t in range.clone() {
        for m in range.clone() {
            let a = 6 * t + 1;
            let b = 6 * m + 1;
            if (a * a + 8 * b * b).rem_euclid(pi) == 0 {
                out.push((t, m));
            }
        }
    }
    out
}

/// Whether the only solution is `t = m = (±p-1)/6`.
pub fn g3_unique(p: u64) -> bool {
    let s = excluded_t(p);
    g3_solutions(p) == [(s, s)]
}

/// Runs a claim natively in its residue ring and again from exact integers
/// reduced afterwards; reports a failure if the verdicts differ.
pub fn exact_modular_agreement(
    check: &CongruenceCheck,
    p: Option<u64>,
    alpha: u32,
    n_terms: usize,
) -> VerificationReport {
    let plan = match check.plan(p, alpha, n_terms) {
        Ok(plan) => plan,
        Err(e) => return check.config_error(p, alpha, n_terms, e),
    };
    let native = check.run(&plan, &named_series(check.series, plan.ring, plan.order));
    let exact = check.run(&plan, &named_series(check.series, Ring::Exact, plan.order));
    let id = format!("{}/exact-vs-modular", check.id);
    if native.status == exact.status && native.first_failure == exact.first_failure {
        VerificationReport::pass(&id, &check.label, native.params)
    } else {
        VerificationReport::fail(
            &id,
            &check.label,
            native.params,
            FirstFailure {
                n: 0,
                j: None,
                index: None,
                lhs: format!("native: {}", native.status),
                rhs: format!("exact then reduced: {}", exact.status),
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    fn claim(kind: ClaimKind, stride: u64, offset: Offset) -> CongruenceCheck {
        CongruenceCheck {
            id: "x".into(),
            label: "x".into(),
            series: SeriesName::G(2),
            kind,
            stride,
            offset,
            stride_pow: 0,
            offset_pow: 0,
            modulus: Some(4),
            rhs: None,
            prime: Some(PrimeCondition::Any { min_p: 3 }),
            max_alpha: None,
        }
    }

    #[test]
    fn admissible_prime_lists() {
        let c = PrimeCondition::Legendre { min_p: 5, xi: -8 };
        let expected: Vec<u64> = (5..=12)
            .filter(|&p| is_prime(p) && legendre(-8, p) == Ok(-1))
            .collect();
        assert_eq!(c.admissible_primes(12), expected);
        assert_eq!(
            PrimeCondition::Any { min_p: 3 }.admissible_primes(10),
            [3, 5, 7]
        );
        assert!(PrimeCondition::Any { min_p: 5 }
            .admissible_primes(4)
            .is_empty());
        // (-2/3) = +1, so the smallest admitted prime is above 3
        assert_eq!(
            PrimeCondition::Legendre { min_p: 3, xi: -2 }.smallest(100),
            Some(5)
        );
        assert_eq!(
            PrimeCondition::Legendre { min_p: 5, xi: -6 }.smallest(100),
            Some(13)
        );
    }

    #[test]
    fn family_indices() {
        let c = claim(ClaimKind::JFamily, 16, Offset::new(2, 0, 1));
        let plan = c.plan(Some(3), 0, 20).unwrap();
        let offs: Vec<_> = plan.progressions.iter().map(|&(j, s, o)| (j, s, o)).collect();
        assert_eq!(offs, [(1, 144, 66), (2, 144, 114)]);
        assert_eq!(c.family_index(3, 0, 1, 0).unwrap(), 48 + 18);
        assert_eq!(
            c.family_index(3, 0, 3, 0),
            Err(ConfigError::JOutOfRange { j: 3, p: 3 })
        );
        assert_eq!(
            c.family_index(3, 0, 0, 0),
            Err(ConfigError::JOutOfRange { j: 0, p: 3 })
        );
    }

    #[test]
    fn offsets_must_be_integral() {
        let c = claim(ClaimKind::SeriesCongruence, 4, Offset::new(1, -1, 2));
        assert_eq!(c.offset.eval(25), Ok(12));
        assert!(matches!(
            Offset::new(1, 0, 2).eval(25),
            Err(ConfigError::NonIntegralOffset { .. })
        ));
        let mut bad = claim(ClaimKind::SeriesCongruence, 4, Offset::new(1, 0, 2));
        bad.rhs = Some("1".into());
        let r = bad.check(Some(5), 0, 10, 1 << 20);
        assert_eq!(r.status, Status::Error);
    }

    #[test]
    fn unadmitted_prime_is_an_error() {
        let mut c = claim(ClaimKind::JFamily, 8, Offset::new(3, 0, 1));
        c.prime = Some(PrimeCondition::Legendre { min_p: 5, xi: -8 });
        assert!(matches!(
            c.plan(Some(11), 0, 5),
            Err(ConfigError::PrimeNotAdmitted { p: 11, .. })
        ));
        assert_eq!(c.plan(None, 0, 5), Err(ConfigError::PrimeRequired));
    }

    #[test]
    fn g2_progression_mod_4() {
        let mut c = claim(ClaimKind::SeriesCongruence, 16, Offset::new(2, 0, 1));
        c.rhs = Some("2*psi(q^1)".into());
        let r = c.check(Some(3), 0, 60, 1 << 20);
        assert!(r.is_pass(), "{:?}", r);
        let r = c.strengthened().check(Some(3), 0, 60, 1 << 20);
        assert_eq!(r.status, Status::Fail);
        let f = r.first_failure.unwrap();
        assert_eq!((f.n, f.index), (0, Some(2)));
        assert_eq!((f.lhs.as_str(), f.rhs.as_str()), ("6", "2"));
    }

    #[test]
    fn budget_skips() {
        let c = claim(ClaimKind::JFamily, 16, Offset::new(2, 0, 1));
        let r = c.check(Some(3), 0, 20, 100);
        assert_eq!(r.status, Status::Skip);
    }

    #[test]
    fn templates() {
        assert_eq!(fill_template("4*l{p}*l{8p}", Some(5)), "4*l5*l40");
        assert_eq!(fill_template("{eps}*l{p}", Some(5)), "-1*l5");
        assert_eq!(fill_template("{eps}*l{p}", Some(7)), "-1*l7");
        assert_eq!(fill_template("{eps}*l{p}", Some(13)), "1*l13");
        assert_eq!(fill_template("2*psi(q^1)", None), "2*psi(q^1)");
    }

    #[test]
    fn g3_scan_small() {
        assert!(g3_unique(5));
        assert!(g3_unique(7));
        // (-8/11) = +1: extra solutions exist
        assert!(!g3_unique(11));
    }
}
