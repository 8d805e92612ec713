//! p-dissections of `psi(q)` and `l_1`, the 2- and 3-dissections used for the
//! congruence proofs, and the binomial-theorem congruences.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::arith::is_prime;
use crate::builders::{eta_series, jacobi_product_series, theta_series, ThetaAtom};
use crate::expr::{parse_qexpr, Evaluator};
use crate::report::{FirstFailure, Params, VerificationReport};
use crate::series::{Ring, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DissectionError {
    NotOddPrime(u64),
    PrimeTooSmall(u64),
    /// The tail term needs `order > p^2` to contribute.
    OrderTooSmall { p: u64, order: usize },
    NonIntegralExponent { t: i64, numerator: i64 },
}

impl fmt::Display for DissectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DissectionError::NotOddPrime(p) => write!(f, "{} is not an odd prime", p),
            DissectionError::PrimeTooSmall(p) => {
                write!(f, "{} is not a prime at least 5", p)
            }
            DissectionError::OrderTooSmall { p, order } => write!(
                f,
                "order {} does not exceed p^2 = {}",
                order,
                p * p
            ),
            DissectionError::NonIntegralExponent { t, numerator } => write!(
                f,
                "theta exponent {}/2 at t = {} is not an integer",
                numerator, t
            ),
        }
    }
}

/// One summand: `sign * q^shift * f(c q^a, c q^b)` (or the tail series).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub t: Option<i64>,
    pub sign: i8,
    pub shift: usize,
    pub theta: Option<ThetaAtom>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DissectionWitness {
    pub p: u64,
    pub heads: Vec<Component>,
    pub tail_shift: usize,
    pub tail_sign: i8,
}

impl DissectionWitness {
    /// Residue class mod p of each head's exponent support, with the tail's.
    pub fn component_map(&self) -> BTreeMap<u64, Vec<Option<i64>>> {
        let mut map: BTreeMap<u64, Vec<Option<i64>>> = BTreeMap::new();
        for h in &self.heads {
            map.entry(h.shift as u64 % self.p).or_default().push(h.t);
        }
        map.entry(self.tail_shift as u64 % self.p)
            .or_default()
            .push(None);
        map
    }

    /// Whether the tail residue differs from every head residue.
    pub fn tail_avoids_heads(&self) -> Option<i64> {
        let tail = self.tail_shift as u64 % self.p;
        self.heads
            .iter()
            .find(|h| h.shift as u64 % self.p == tail)
            .map(|h| h.t.unwrap_or(0))
    }
}

fn check_odd_prime(p: u64) -> Result<(), DissectionError> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(DissectionError::NotOddPrime(p));
    }
    Ok(())
}

fn half(t: i64, numerator: i64) -> Result<u32, DissectionError> {
    if numerator % 2 != 0 || numerator <= 0 {
        return Err(DissectionError::NonIntegralExponent { t, numerator });
    }
    Ok((numerator / 2) as u32)
}

pub fn psi_witness(p: u64) -> Result<DissectionWitness, DissectionError> {
    check_odd_prime(p)?;
    let pi = p as i64;
    let mut heads = Vec::new();
    for t in 0..=(pi - 3) / 2 {
        let a = half(t, pi * pi + (2 * t + 1) * pi)?;
        let b = half(t, pi * pi - (2 * t + 1) * pi)?;
        heads.push(Component {
            t: Some(t),
            sign: 1,
            shift: ((t * t + t) / 2) as usize,
            theta: Some(ThetaAtom::general((1, a), (1, b)).expect("a, b positive")),
        });
    }
    Ok(DissectionWitness {
        p,
        heads,
        tail_shift: ((p * p - 1) / 8) as usize,
        tail_sign: 1,
    })
}

/// `(p - 1)/6` when `p ≡ 1 (mod 6)`, `(-p - 1)/6` when `p ≡ -1 (mod 6)`.
pub fn excluded_t(p: u64) -> i64 {
    let pi = p as i64;
    if pi % 6 == 1 {
        (pi - 1) / 6
    } else {
        (-pi - 1) / 6
    }
}

pub fn l1_witness(p: u64) -> Result<DissectionWitness, DissectionError> {
    if p < 5 || !is_prime(p) {
        return Err(DissectionError::PrimeTooSmall(p));
    }
    let pi = p as i64;
    let skip = excluded_t(p);
    let mut heads = Vec::new();
    for t in -(pi - 1) / 2..=(pi - 1) / 2 {
        if t == skip {
            continue;
        }
        let a = half(t, 3 * pi * pi + (6 * t + 1) * pi)?;
        let b = half(t, 3 * pi * pi - (6 * t + 1) * pi)?;
        heads.push(Component {
            t: Some(t),
            sign: if t.rem_euclid(2) == 0 { 1 } else { -1 },
            shift: ((3 * t * t + t) / 2) as usize,
            theta: Some(ThetaAtom::general((-1, a), (-1, b)).expect("a, b positive")),
        });
    }
    Ok(DissectionWitness {
        p,
        heads,
        tail_shift: ((p * p - 1) / 24) as usize,
        tail_sign: if skip.rem_euclid(2) == 0 { 1 } else { -1 },
    })
}

fn build_heads(
    w: &DissectionWitness,
    order: usize,
    via_product: bool,
) -> Vec<(u64, TruncatedSeries)> {
    w.heads
        .iter()
        .map(|h| {
            let atom = h.theta.as_ref().expect("heads carry a theta atom");
            let theta = if via_product {
                jacobi_product_series(atom, Ring::Exact, order)
            } else {
                theta_series(atom, Ring::Exact, order)
            }
            .expect("validated atom");
            let s = theta.shift(h.shift).scale_i64(h.sign as i64);
            (h.shift as u64 % w.p, s)
        })
        .collect()
}

fn coefficient_failure(
    n: usize,
    lhs: &TruncatedSeries,
    rhs: &TruncatedSeries,
) -> FirstFailure {
    FirstFailure {
        n,
        j: None,
        index: Some(n as u64),
        lhs: lhs.coeff(n).to_string(),
        rhs: rhs.coeff(n).to_string(),
    }
}

/// Rebuilds the dissection, compares it with `target`, then checks that each
/// residue class of `target` is exactly the sum of the components assigned
/// to it.
fn verify_witness(
    id: &str,
    label: &str,
    w: &DissectionWitness,
    target: &TruncatedSeries,
    tail: TruncatedSeries,
    order: usize,
) -> VerificationReport {
    let params = Params {
        p: Some(w.p),
        order: Some(order),
        ..Params::default()
    };
    if let Some(t) = w.tail_avoids_heads() {
        return VerificationReport::fail(
            id,
            label,
            params,
            FirstFailure {
                n: 0,
                j: Some(t as u64),
                index: None,
                lhs: format!("head residue at t = {}", t),
                rhs: format!("tail residue {}", w.tail_shift as u64 % w.p),
            },
        )
        .with_note("tail residue collides with a head".into());
    }
    let tail_residue = w.tail_shift as u64 % w.p;
    let mut classes: BTreeMap<u64, TruncatedSeries> = BTreeMap::new();
    for (r, s) in build_heads(w, order, false)
        .into_iter()
        .chain(core::iter::once((tail_residue, tail)))
    {
        let slot = classes
            .entry(r)
            .or_insert_with(|| TruncatedSeries::zero(Ring::Exact, order));
        *slot = slot.add(&s).expect("exact ring");
    }
    let mut total = TruncatedSeries::zero(Ring::Exact, order);
    for s in classes.values() {
        total = total.add(s).expect("exact ring");
    }
    if let Some(n) = total.first_difference(target).expect("exact ring") {
        return VerificationReport::fail(
            id,
            label,
            params,
            coefficient_failure(n, &total, target),
        )
        .with_note("dissection sum differs from the series".into());
    }
    let m = w.p as usize;
    for r in 0..w.p {
        let restricted = target
            .ap_extract(m, r as usize)
            .expect("positive stride")
            .substitute_power(m, order.saturating_sub(r as usize))
            .shift(r as usize)
            .truncate(order);
        let expected = classes
            .get(&r)
            .cloned()
            .unwrap_or_else(|| TruncatedSeries::zero(Ring::Exact, order));
        if let Some(n) = restricted.first_difference(&expected).expect("exact ring") {
            return VerificationReport::fail(
                id,
                label,
                params,
                coefficient_failure(n, &restricted, &expected),
            )
            .with_note(format!("residue class {} mod {} is not supported as claimed", r, w.p));
        }
    }
    VerificationReport::pass(id, label, params)
}

pub fn verify_psi_dissection(p: u64, order: usize) -> Result<VerificationReport, DissectionError> {
    let w = psi_witness(p)?;
    if order as u64 <= p * p {
        return Err(DissectionError::OrderTooSmall { p, order });
    }
    let target = theta_series(&ThetaAtom::psi(1), Ring::Exact, order).expect("psi");
    let tail = theta_series(&ThetaAtom::psi((p * p) as u32), Ring::Exact, order)
        .expect("psi")
        .shift(w.tail_shift);
    Ok(verify_witness(
        &format!("psi-dissection/p={}", p),
        "p-dissection of psi(q)",
        &w,
        &target,
        tail,
        order,
    ))
}

pub fn verify_l1_dissection(p: u64, order: usize) -> Result<VerificationReport, DissectionError> {
    let w = l1_witness(p)?;
    if order as u64 <= p * p {
        return Err(DissectionError::OrderTooSmall { p, order });
    }
    let target = eta_series(1, Ring::Exact, order).expect("l1");
    let tail = eta_series((p * p) as u32, Ring::Exact, order)
        .expect("l_{p^2}")
        .shift(w.tail_shift)
        .scale_i64(w.tail_sign as i64);
    let id = format!("l1-dissection/p={}", p);
    let label = "p-dissection of l1";
    let report = verify_witness(&id, label, &w, &target, tail, order);
    if !report.is_pass() || p > 7 {
        return Ok(report);
    }
    // the product route must give the same heads
    let sums = build_heads(&w, order, false);
    let products = build_heads(&w, order, true);
    for ((_, a), (_, b)) in sums.iter().zip(&products) {
        if let Some(n) = a.first_difference(b).expect("exact ring") {
            return Ok(VerificationReport::fail(
                &id,
                label,
                report.params,
                coefficient_failure(n, a, b),
            )
            .with_note("theta sum and triple product disagree".into()));
        }
    }
    Ok(report)
}

/// Residue avoidance for both lemmas at one prime: `None` if it holds, else
/// the offending `t`.
pub fn psi_residue_clash(p: u64) -> Result<Option<i64>, DissectionError> {
    check_odd_prime(p)?;
    let pi = p as i64;
    let tail = ((pi * pi - 1) / 8).rem_euclid(pi);
    Ok((0..=(pi - 3) / 2).find(|t| ((t * t + t) / 2).rem_euclid(pi) == tail))
}

pub fn l1_residue_clash(p: u64) -> Result<Option<i64>, DissectionError> {
    if p < 5 || !is_prime(p) {
        return Err(DissectionError::PrimeTooSmall(p));
    }
    let pi = p as i64;
    let skip = excluded_t(p);
    let tail = ((pi * pi - 1) / 24).rem_euclid(pi);
    Ok((-(pi - 1) / 2..=(pi - 1) / 2)
        .filter(|&t| t != skip)
        .find(|t| ((3 * t * t + t) / 2).rem_euclid(pi) == tail))
}

/// Identity `lhs = rhs` between expressions, exactly to `order`.
pub fn verify_expr_identity(
    id: &str,
    label: &str,
    lhs: &str,
    rhs: &str,
    ring: Ring,
    order: usize,
) -> VerificationReport {
    let params = Params {
        order: Some(order),
        modulus: ring.modulus(),
        ..Params::default()
    };
    let mut ev = Evaluator::new(ring, order);
    let eval = |ev: &mut Evaluator, text: &str| -> Result<TruncatedSeries, String> {
        let e = parse_qexpr(text).map_err(|e| format!("{}: {}", text, e))?;
        ev.eval(&e).map_err(|e| format!("{}: {}", text, e))
    };
    let (a, b) = match (eval(&mut ev, lhs), eval(&mut ev, rhs)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return VerificationReport::error(id, label, params, e),
    };
    match a.first_difference(&b).expect("same ring") {
        None => VerificationReport::pass(id, label, params),
        Some(n) => VerificationReport::fail(id, label, params, coefficient_failure(n, &a, &b)),
    }
}

pub const TWO_THREE_DISSECTIONS: [(&str, &str, &str); 3] = [
    (
        "2-dissection/l3^3/l1",
        "l3^3/l1",
        "l4^3*l6^2/(l2^2*l12) + q^1*l12^3/l4",
    ),
    (
        "3-dissection/l2^2/l1",
        "l2^2/l1",
        "l6*l9^2/(l3*l18) + q^1*l18^2/l9",
    ),
    (
        "3-dissection/l2/l1^2",
        "l2/l1^2",
        "l6^4*l9^6/(l3^8*l18^3) + 2*q^1*l6^3*l9^3/l3^7 + 4*q^2*l6^2*l18^3/l3^6",
    ),
];

pub fn verify_2_3_dissections(order: usize) -> Vec<VerificationReport> {
    TWO_THREE_DISSECTIONS
        .iter()
        .map(|(id, lhs, rhs)| {
            verify_expr_identity(id, &format!("{} = {}", lhs, rhs), lhs, rhs, Ring::Exact, order)
        })
        .collect()
}

/// `l_{2k}^m ≡ l_k^{2m} (mod 2)` and `l_{2k}^{2m} ≡ l_k^{4m} (mod 4)`.
pub fn verify_binomial_congruences(k: u32, m: u32, order: usize) -> VerificationReport {
    let id = format!("binomial/k={}/m={}", k, m);
    let label = "binomial-theorem congruences";
    let parts = [
        verify_expr_identity(
            &id,
            "mod 2",
            &format!("l{}^{}", 2 * k, m),
            &format!("l{}^{}", k, 2 * m),
            Ring::Mod2k(1),
            order,
        ),
        verify_expr_identity(
            &id,
            "mod 4",
            &format!("l{}^{}", 2 * k, 2 * m),
            &format!("l{}^{}", k, 4 * m),
            Ring::Mod2k(2),
            order,
        ),
    ];
    VerificationReport::combine(
        &id,
        label,
        Params {
            order: Some(order),
            ..Params::default()
        },
        &parts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn psi_dissection_small_primes() {
        for p in [3, 5, 7] {
            assert!(verify_psi_dissection(p, 120).unwrap().is_pass(), "p = {}", p);
        }
        assert_eq!(
            verify_psi_dissection(2, 100),
            Err(DissectionError::NotOddPrime(2))
        );
        assert_eq!(
            verify_psi_dissection(11, 100),
            Err(DissectionError::OrderTooSmall { p: 11, order: 100 })
        );
    }

    #[test]
    fn psi_residues_at_five() {
        let w = psi_witness(5).unwrap();
        let map = w.component_map();
        assert_eq!(map.keys().copied().collect::<Vec<_>>(), [0, 1, 3]);
        assert_eq!(psi_residue_clash(5), Ok(None));
    }

    #[test]
    fn l1_dissection_branches() {
        assert_eq!(excluded_t(5), -1);
        assert_eq!(excluded_t(7), 1);
        assert_eq!(excluded_t(11), -2);
        assert_eq!(excluded_t(13), 2);
        for p in [5, 7] {
            assert!(verify_l1_dissection(p, 100).unwrap().is_pass(), "p = {}", p);
        }
        assert_eq!(
            verify_l1_dissection(3, 100),
            Err(DissectionError::PrimeTooSmall(3))
        );
    }

    #[test]
    fn wrong_tail_sign_is_caught() {
        let mut w = l1_witness(5).unwrap();
        w.tail_sign = -w.tail_sign;
        let order = 60;
        let target = eta_series(1, Ring::Exact, order).unwrap();
        let tail = eta_series(25, Ring::Exact, order)
            .unwrap()
            .shift(w.tail_shift)
            .scale_i64(w.tail_sign as i64);
        let r = verify_witness("x", "x", &w, &target, tail, order);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.first_failure.unwrap().n, 1);
    }

    #[test]
    fn two_three_dissections_hold() {
        for r in verify_2_3_dissections(150) {
            assert!(r.is_pass(), "{:?}", r);
        }
    }

    #[test]
    fn binomial_examples() {
        assert!(verify_binomial_congruences(1, 1, 100).is_pass());
        assert!(verify_binomial_congruences(3, 2, 100).is_pass());
        assert!(verify_binomial_congruences(2, 1, 0).is_pass());
    }
}
