//! Small-integer number theory: primality and the Legendre symbol.

use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArithError {
    EvenModulus(u64),
    NotPrime(u64),
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::EvenModulus(p) => write!(f, "{} is not an odd prime", p),
            ArithError::NotPrime(p) => write!(f, "{} is not prime", p),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = base as u128 % m128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// `(xi/p)` by Euler's criterion.
pub fn legendre(xi: i64, p: u64) -> Result<i8, ArithError> {
    if p.is_multiple_of(2) {
        return Err(ArithError::EvenModulus(p));
    }
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    let r = xi.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    match pow_mod(r, (p - 1) / 2, p) {
        1 => Ok(1),
        v if v == p - 1 => Ok(-1),
        v => unreachable!("Euler's criterion gave {} mod {}", v, p),
    }
}
