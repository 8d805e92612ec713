//! Dense truncated power series in `q` over the integers or over `Z/2^kZ`.
//!
//! A [`TruncatedSeries`] stores the coefficients of `q^0 ..= q^N` and nothing
//! else; every binary operation truncates its result to the smaller of the two
//! input orders and never invents coefficients past it.
//!
//! Residue coefficients are held as `u32` and manipulated with wrapping
//! arithmetic. Because `2^k` divides `2^32`, wrapping addition and
//! multiplication are ring homomorphisms onto `Z/2^kZ`, so values are only
//! masked back into `0..2^k` when an operation finishes.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest supported residue width (`Z/2^30Z`).
pub const MAX_RESIDUE_BITS: u8 = 30;

/// Above this many coefficients dense products switch from schoolbook to
/// Karatsuba.
pub const KARATSUBA_THRESHOLD: usize = 8192;

const KARATSUBA_BASE: usize = 48;

/// The coefficient ring of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ring {
    /// Arbitrary-precision integers.
    Exact,
    /// Residues modulo `2^k`; the payload is `k`.
    Mod2k(u8),
}

impl Ring {
    /// `Z/2^bits Z`, validating the width.
    pub fn mod_pow2(bits: u8) -> Result<Ring, SeriesError> {
        if bits == 0 || bits > MAX_RESIDUE_BITS {
            return Err(SeriesError::InvalidResidueWidth(bits));
        }
        Ok(Ring::Mod2k(bits))
    }

    /// The residue ring for a modulus that must be a power of two (`2 ..= 2^30`).
    pub fn from_modulus(modulus: u64) -> Result<Ring, SeriesError> {
        if modulus < 2 || !modulus.is_power_of_two() {
            return Err(SeriesError::InvalidModulus(modulus));
        }
        Ring::mod_pow2(modulus.trailing_zeros() as u8)
    }

    /// `Some(2^k)` for residue rings, `None` for the integers.
    pub fn modulus(&self) -> Option<u64> {
        match *self {
            Ring::Exact => None,
            Ring::Mod2k(bits) => Some(1u64 << bits),
        }
    }

    /// Maps an integer into this ring.
    pub fn element(&self, value: &BigInt) -> RingElement {
        match *self {
            Ring::Exact => RingElement::Integer(value.clone()),
            Ring::Mod2k(bits) => RingElement::Residue {
                value: reduce_bigint(value, bits),
                bits,
            },
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Exact => f.write_str("exact"),
            Ring::Mod2k(bits) => write!(f, "mod {}", 1u64 << bits),
        }
    }
}

/// One coefficient, tagged with its ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RingElement {
    Integer(BigInt),
    /// Normalized representative in `0 .. 2^bits`.
    Residue { value: u32, bits: u8 },
}

impl RingElement {
    pub fn is_zero(&self) -> bool {
        match self {
            RingElement::Integer(v) => v.is_zero(),
            RingElement::Residue { value, .. } => *value == 0,
        }
    }

    /// The integer representative (residues lift to `0 .. 2^bits`).
    pub fn lift(&self) -> BigInt {
        match self {
            RingElement::Integer(v) => v.clone(),
            RingElement::Residue { value, .. } => BigInt::from(*value),
        }
    }

    pub fn ring(&self) -> Ring {
        match self {
            RingElement::Integer(_) => Ring::Exact,
            RingElement::Residue { bits, .. } => Ring::Mod2k(*bits),
        }
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElement::Integer(v) => write!(f, "{}", v),
            RingElement::Residue { value, .. } => write!(f, "{}", value),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesError {
    RingMismatch { left: Ring, right: Ring },
    /// Division by a series whose constant term is not invertible.
    NonUnit { ring: Ring, constant: String },
    ResidueOutOfRange { residue: usize, modulus: usize },
    /// A progression starting past the last known coefficient.
    BeyondOrder { index: usize, order: usize },
    ZeroStride,
    InvalidResidueWidth(u8),
    InvalidModulus(u64),
    /// `reduce_mod` asked to widen a residue ring.
    CannotWiden { from: Ring, to: Ring },
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::RingMismatch { left, right } => {
                write!(f, "ring mismatch: {} vs {}", left, right)
            }
            SeriesError::NonUnit { ring, constant } => write!(
                f,
                "constant term {} is not a unit in the {} ring",
                constant, ring
            ),
            SeriesError::ResidueOutOfRange { residue, modulus } => {
                write!(f, "residue {} is not below modulus {}", residue, modulus)
            }
            SeriesError::BeyondOrder { index, order } => {
                write!(f, "coefficient {} is past the series order {}", index, order)
            }
            SeriesError::ZeroStride => f.write_str("progression stride must be positive"),
            SeriesError::InvalidResidueWidth(bits) => write!(
                f,
                "residue width 2^{} outside 2^1..=2^{}",
                bits, MAX_RESIDUE_BITS
            ),
            SeriesError::InvalidModulus(m) => {
                write!(f, "modulus {} is not a supported power of two", m)
            }
            SeriesError::CannotWiden { from, to } => {
                write!(f, "cannot reduce a {} series to {}", from, to)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Coeffs {
    Exact(Vec<BigInt>),
    Residue { bits: u8, values: Vec<u32> },
}

/// `sum_{i=0}^{N} c_i q^i` with `N = order()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Coeffs,
}

fn mask(bits: u8) -> u32 {
    if bits >= 32 {
        u32::MAX
    } else {
        (1u32 << bits) - 1
    }
}

fn reduce_bigint(v: &BigInt, bits: u8) -> u32 {
    // two's-complement low word: valid mod 2^bits for negative values too
    let m = BigInt::from(1u64 << bits);
    let mut r = v % &m;
    if r.is_negative() {
        r += &m;
    }
    r.to_u32().expect("reduced value fits in u32")
}

fn reduce_i64(v: i64, bits: u8) -> u32 {
    (v as u64 as u32) & mask(bits)
}

trait Scalar: Clone {
    fn s_zero() -> Self;
    fn s_is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    fn mul_add(&mut self, a: &Self, b: &Self);
    fn mul(&self, other: &Self) -> Self;
}

impl Scalar for BigInt {
    fn s_zero() -> Self {
        Zero::zero()
    }
    fn s_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_add(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Scalar for u32 {
    fn s_zero() -> Self {
        0
    }
    fn s_is_zero(&self) -> bool {
        *self == 0
    }
    fn add_assign(&mut self, other: &Self) {
        *self = self.wrapping_add(*other);
    }
    fn sub_assign(&mut self, other: &Self) {
        *self = self.wrapping_sub(*other);
    }
    fn mul_add(&mut self, a: &Self, b: &Self) {
        *self = self.wrapping_add(a.wrapping_mul(*b));
    }
    fn mul(&self, other: &Self) -> Self {
        self.wrapping_mul(*other)
    }
}

fn nonzero_positions<T: Scalar>(a: &[T]) -> Vec<usize> {
    a.iter()
        .enumerate()
        .filter(|(_, c)| !c.s_is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// Truncated Cauchy product with `len` output coefficients.
fn convolve<T: Scalar>(a: &[T], b: &[T], len: usize) -> Vec<T> {
    let a = &a[..len.min(a.len())];
    let b = &b[..len.min(b.len())];
    let nz_a = nonzero_positions(a);
    let nz_b = nonzero_positions(b);
    let mut out = vec![T::s_zero(); len];
    if nz_a.is_empty() || nz_b.is_empty() {
        return out;
    }
    let (sparse, sparse_nz, dense) = if nz_a.len() <= nz_b.len() {
        (a, &nz_a, b)
    } else {
        (b, &nz_b, a)
    };
    let dense_cutoff = len / 16 + 1;
    if sparse_nz.len() <= dense_cutoff || len < KARATSUBA_THRESHOLD {
        for &i in sparse_nz.iter() {
            let x = &sparse[i];
            let span = (len - i).min(dense.len());
            for (o, d) in out[i..i + span].iter_mut().zip(&dense[..span]) {
                if !d.s_is_zero() {
                    o.mul_add(x, d);
                }
            }
        }
        return out;
    }
    let full = karatsuba(a, b);
    for (o, v) in out.iter_mut().zip(full) {
        *o = v;
    }
    out
}

fn schoolbook_full<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::s_zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.s_is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j].mul_add(x, y);
        }
    }
    out
}

/// Full (untruncated) product; exact over any commutative ring.
fn karatsuba<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len() <= KARATSUBA_BASE || b.len() <= KARATSUBA_BASE {
        return schoolbook_full(a, b);
    }
    let half = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(half.min(a.len()));
    let (b0, b1) = b.split_at(half.min(b.len()));
    let z0 = karatsuba(a0, b0);
    let z2 = karatsuba(a1, b1);
    let sum = |x: &[T], y: &[T]| -> Vec<T> {
        let mut s: Vec<T> = x.to_vec();
        if s.len() < y.len() {
            s.resize(y.len(), T::s_zero());
        }
        for (o, v) in s.iter_mut().zip(y) {
            o.add_assign(v);
        }
        s
    };
    let mut z1 = karatsuba(&sum(a0, a1), &sum(b0, b1));
    for (o, v) in z1.iter_mut().zip(&z0) {
        o.sub_assign(v);
    }
    for (o, v) in z1.iter_mut().zip(&z2) {
        o.sub_assign(v);
    }
    let mut out = vec![T::s_zero(); a.len() + b.len() - 1];
    for (i, v) in z0.iter().enumerate() {
        out[i].add_assign(v);
    }
    for (i, v) in z1.iter().enumerate() {
        if i + half < out.len() {
            out[i + half].add_assign(v);
        }
    }
    for (i, v) in z2.iter().enumerate() {
        if i + 2 * half < out.len() {
            out[i + 2 * half].add_assign(v);
        }
    }
    out
}

/// `c` with `b * c = a`, given `inv_b0 * b[0] = 1`.
fn divide<T: Scalar>(a: &[T], b: &[T], inv_b0: &T, len: usize) -> Vec<T> {
    let nz_b: Vec<usize> = nonzero_positions(&b[..len.min(b.len())])
        .into_iter()
        .filter(|&i| i > 0)
        .collect();
    let mut c: Vec<T> = Vec::with_capacity(len);
    for n in 0..len {
        let mut acc = a[n].clone();
        for &i in nz_b.iter() {
            if i > n {
                break;
            }
            let t = b[i].mul(&c[n - i]);
            acc.sub_assign(&t);
        }
        c.push(acc.mul(inv_b0));
    }
    c
}

fn inverse_mod_2_32(x: u32) -> u32 {
    debug_assert!(x & 1 == 1);
    let mut y = x;
    for _ in 0..5 {
        y = y.wrapping_mul(2u32.wrapping_sub(x.wrapping_mul(y)));
    }
    y
}

impl TruncatedSeries {
    pub fn zero(ring: Ring, order: usize) -> Self {
        let coeffs = match ring {
            Ring::Exact => Coeffs::Exact(vec![BigInt::zero(); order + 1]),
            Ring::Mod2k(bits) => Coeffs::Residue {
                bits,
                values: vec![0; order + 1],
            },
        };
        TruncatedSeries { coeffs }
    }

    pub fn one(ring: Ring, order: usize) -> Self {
        Self::monomial(ring, 0, 1, order)
    }

    /// `coeff * q^exponent`; zero if the exponent exceeds `order`.
    pub fn monomial(ring: Ring, exponent: usize, coeff: i64, order: usize) -> Self {
        let mut s = Self::zero(ring, order);
        if exponent <= order {
            s.set_i64(exponent, coeff);
        }
        s
    }

    /// Builds a series from explicit integer coefficients (`order = len - 1`).
    ///
    /// Panics on an empty slice.
    pub fn from_i64s(ring: Ring, coeffs: &[i64]) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        let mut s = Self::zero(ring, coeffs.len() - 1);
        for (i, &c) in coeffs.iter().enumerate() {
            s.set_i64(i, c);
        }
        s
    }

    /// Builds a series from big-integer coefficients (`order = len - 1`).
    pub fn from_bigints(ring: Ring, coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        match ring {
            Ring::Exact => TruncatedSeries {
                coeffs: Coeffs::Exact(coeffs),
            },
            Ring::Mod2k(bits) => TruncatedSeries {
                coeffs: Coeffs::Residue {
                    bits,
                    values: coeffs.iter().map(|c| reduce_bigint(c, bits)).collect(),
                },
            },
        }
    }

    fn set_i64(&mut self, i: usize, c: i64) {
        match &mut self.coeffs {
            Coeffs::Exact(v) => v[i] = BigInt::from(c),
            Coeffs::Residue { bits, values } => values[i] = reduce_i64(c, *bits),
        }
    }

    pub fn order(&self) -> usize {
        self.len() - 1
    }

    /// Number of stored coefficients, `order + 1`.
    pub fn len(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(v) => v.len(),
            Coeffs::Residue { values, .. } => values.len(),
        }
    }

    pub fn ring(&self) -> Ring {
        match &self.coeffs {
            Coeffs::Exact(_) => Ring::Exact,
            Coeffs::Residue { bits, .. } => Ring::Mod2k(*bits),
        }
    }

    /// Coefficient of `q^i`. Panics if `i > order()`.
    pub fn coeff(&self, i: usize) -> RingElement {
        match &self.coeffs {
            Coeffs::Exact(v) => RingElement::Integer(v[i].clone()),
            Coeffs::Residue { bits, values } => RingElement::Residue {
                value: values[i],
                bits: *bits,
            },
        }
    }

    pub fn get(&self, i: usize) -> Option<RingElement> {
        (i <= self.order()).then(|| self.coeff(i))
    }

    /// All coefficients as integers (residues lifted to `0 .. 2^k`).
    pub fn coefficients(&self) -> Vec<BigInt> {
        match &self.coeffs {
            Coeffs::Exact(v) => v.clone(),
            Coeffs::Residue { values, .. } => values.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero_count() == 0
    }

    pub fn nonzero_count(&self) -> usize {
        match &self.coeffs {
            Coeffs::Exact(v) => v.iter().filter(|c| !c.is_zero()).count(),
            Coeffs::Residue { values, .. } => values.iter().filter(|&&c| c != 0).count(),
        }
    }

    /// Drops coefficients above `order` (no-op if already shorter).
    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.len());
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v[..keep].to_vec()),
            Coeffs::Residue { bits, values } => Coeffs::Residue {
                bits: *bits,
                values: values[..keep].to_vec(),
            },
        };
        TruncatedSeries { coeffs }
    }

    fn check_ring(&self, other: &Self) -> Result<(), SeriesError> {
        if self.ring() != other.ring() {
            return Err(SeriesError::RingMismatch {
                left: self.ring(),
                right: other.ring(),
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &Self,
        exact: impl Fn(&BigInt, &BigInt) -> BigInt,
        residue: impl Fn(u32, u32) -> u32,
    ) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let len = self.len().min(other.len());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                Coeffs::Exact(a[..len].iter().zip(&b[..len]).map(|(x, y)| exact(x, y)).collect())
            }
            (Coeffs::Residue { bits, values: a }, Coeffs::Residue { values: b, .. }) => {
                let m = mask(*bits);
                Coeffs::Residue {
                    bits: *bits,
                    values: a[..len]
                        .iter()
                        .zip(&b[..len])
                        .map(|(&x, &y)| residue(x, y) & m)
                        .collect(),
                }
            }
            _ => unreachable!("rings checked above"),
        };
        Ok(TruncatedSeries { coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.zip_with(other, |x, y| x + y, u32::wrapping_add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.zip_with(other, |x, y| x - y, u32::wrapping_sub)
    }

    pub fn neg(&self) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|c| -c).collect()),
            Coeffs::Residue { bits, values } => {
                let m = mask(*bits);
                Coeffs::Residue {
                    bits: *bits,
                    values: values.iter().map(|&c| c.wrapping_neg() & m).collect(),
                }
            }
        };
        TruncatedSeries { coeffs }
    }

    /// Multiplies every coefficient by an integer scalar.
    pub fn scale(&self, factor: &BigInt) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|c| c * factor).collect()),
            Coeffs::Residue { bits, values } => {
                let f = reduce_bigint(factor, *bits);
                let m = mask(*bits);
                Coeffs::Residue {
                    bits: *bits,
                    values: values.iter().map(|&c| c.wrapping_mul(f) & m).collect(),
                }
            }
        };
        TruncatedSeries { coeffs }
    }

    pub fn scale_i64(&self, factor: i64) -> Self {
        self.scale(&BigInt::from(factor))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_ring(other)?;
        let len = self.len().min(other.len());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => Coeffs::Exact(convolve(a, b, len)),
            (Coeffs::Residue { bits, values: a }, Coeffs::Residue { values: b, .. }) => {
                let m = mask(*bits);
                let mut values = convolve(a, b, len);
                values.iter_mut().for_each(|c| *c &= m);
                Coeffs::Residue { bits: *bits, values }
            }
            _ => unreachable!("rings checked above"),
        };
        Ok(TruncatedSeries { coeffs })
    }

    /// `self / divisor`, defined when the divisor's constant term is a unit
    /// (`+-1` over the integers, odd modulo `2^k`).
    pub fn div_unit(&self, divisor: &Self) -> Result<Self, SeriesError> {
        self.check_ring(divisor)?;
        let len = self.len().min(divisor.len());
        let coeffs = match (&self.coeffs, &divisor.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => {
                let b0 = &b[0];
                if !(b0.is_one() || (-b0).is_one()) {
                    return Err(SeriesError::NonUnit {
                        ring: Ring::Exact,
                        constant: alloc::format!("{}", b0),
                    });
                }
                // +-1 is its own inverse
                Coeffs::Exact(divide(a, b, b0, len))
            }
            (Coeffs::Residue { bits, values: a }, Coeffs::Residue { values: b, .. }) => {
                if b[0] & 1 == 0 {
                    return Err(SeriesError::NonUnit {
                        ring: Ring::Mod2k(*bits),
                        constant: alloc::format!("{}", b[0]),
                    });
                }
                let inv = inverse_mod_2_32(b[0]);
                let m = mask(*bits);
                let mut values = divide(a, b, &inv, len);
                values.iter_mut().for_each(|c| *c &= m);
                Coeffs::Residue { bits: *bits, values }
            }
            _ => unreachable!("rings checked above"),
        };
        Ok(TruncatedSeries { coeffs })
    }

    /// Integer power; negative exponents go through [`Self::div_unit`].
    ///
    /// Multiplies by `self` one factor at a time so that a sparse base keeps
    /// each step on the sparse convolution path.
    pub fn pow(&self, exponent: i64) -> Result<Self, SeriesError> {
        let mut acc = Self::one(self.ring(), self.order());
        for _ in 0..exponent.unsigned_abs() {
            acc = if exponent > 0 {
                acc.mul(self)?
            } else {
                acc.div_unit(self)?
            };
        }
        Ok(acc)
    }

    /// `q^s * self`, keeping the same order.
    pub fn shift(&self, s: usize) -> Self {
        let mut out = Self::zero(self.ring(), self.order());
        let len = self.len();
        if s >= len {
            return out;
        }
        match (&mut out.coeffs, &self.coeffs) {
            (Coeffs::Exact(o), Coeffs::Exact(a)) => o[s..].clone_from_slice(&a[..len - s]),
            (Coeffs::Residue { values: o, .. }, Coeffs::Residue { values: a, .. }) => {
                o[s..].copy_from_slice(&a[..len - s])
            }
            _ => unreachable!(),
        }
        out
    }

    /// `sum_n a(m n + r) q^n`, of order `floor((N - r) / m)`.
    ///
    /// When `r > N` there is no coefficient to extract; the result is the
    /// zero series of order 0 so callers can detect the shortfall by order.
    pub fn ap_extract(&self, m: usize, r: usize) -> Result<Self, SeriesError> {
        if m == 0 {
            return Err(SeriesError::ZeroStride);
        }
        if r >= m {
            return Err(SeriesError::ResidueOutOfRange { residue: r, modulus: m });
        }
        if r > self.order() {
            return Err(SeriesError::BeyondOrder {
                index: r,
                order: self.order(),
            });
        }
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().skip(r).step_by(m).cloned().collect()),
            Coeffs::Residue { bits, values } => Coeffs::Residue {
                bits: *bits,
                values: values.iter().skip(r).step_by(m).copied().collect(),
            },
        };
        Ok(TruncatedSeries { coeffs })
    }

    /// Coefficients `a(m n + start)` for `n >= 0`, with `start` anywhere up
    /// to the order.
    pub fn progression(&self, m: usize, start: usize) -> Result<Self, SeriesError> {
        if m == 0 {
            return Err(SeriesError::ZeroStride);
        }
        if start > self.order() {
            return Err(SeriesError::BeyondOrder {
                index: start,
                order: self.order(),
            });
        }
        let s = self.ap_extract(m, start % m)?;
        let skip = start / m;
        let coeffs = match s.coeffs {
            Coeffs::Exact(v) => Coeffs::Exact(v[skip..].to_vec()),
            Coeffs::Residue { bits, values } => Coeffs::Residue {
                bits,
                values: values[skip..].to_vec(),
            },
        };
        Ok(TruncatedSeries { coeffs })
    }

    /// `a(q^k)`. Every coefficient up to `k (N + 1) - 1` is determined by the
    /// input; the result is truncated there or at `cap`, whichever is lower.
    pub fn substitute_power(&self, k: usize, cap: usize) -> Self {
        assert!(k >= 1, "substitution power must be positive");
        let order = (k * (self.order() + 1) - 1).min(cap);
        let mut out = Self::zero(self.ring(), order);
        match (&mut out.coeffs, &self.coeffs) {
            (Coeffs::Exact(o), Coeffs::Exact(a)) => {
                for (i, c) in a.iter().enumerate().take_while(|(i, _)| i * k <= order) {
                    o[i * k] = c.clone();
                }
            }
            (Coeffs::Residue { values: o, .. }, Coeffs::Residue { values: a, .. }) => {
                for (i, &c) in a.iter().enumerate().take_while(|(i, _)| i * k <= order) {
                    o[i * k] = c;
                }
            }
            _ => unreachable!(),
        }
        out
    }

    /// Reduces coefficients into `Z/2^bits Z`. Residue inputs may only be
    /// narrowed.
    pub fn reduce_mod(&self, bits: u8) -> Result<Self, SeriesError> {
        let target = Ring::mod_pow2(bits)?;
        let coeffs = match &self.coeffs {
            Coeffs::Exact(v) => Coeffs::Residue {
                bits,
                values: v.iter().map(|c| reduce_bigint(c, bits)).collect(),
            },
            Coeffs::Residue { bits: from, values } => {
                if *from < bits {
                    return Err(SeriesError::CannotWiden {
                        from: self.ring(),
                        to: target,
                    });
                }
                let m = mask(bits);
                Coeffs::Residue {
                    bits,
                    values: values.iter().map(|&c| c & m).collect(),
                }
            }
        };
        Ok(TruncatedSeries { coeffs })
    }

    /// In place: `self *= (1 - sign q^e)`. With `e = 0` this is the scalar
    /// `1 - sign`.
    pub fn mul_binomial(&mut self, sign: i8, e: usize) {
        let len = self.len();
        if e == 0 {
            *self = self.scale_i64(1 - sign as i64);
            return;
        }
        if e >= len {
            return;
        }
        match &mut self.coeffs {
            Coeffs::Exact(v) => {
                for i in (e..len).rev() {
                    let t = v[i - e].clone();
                    if sign > 0 {
                        v[i] -= t;
                    } else {
                        v[i] += t;
                    }
                }
            }
            Coeffs::Residue { bits, values } => {
                let m = mask(*bits);
                for i in (e..len).rev() {
                    let t = values[i - e];
                    values[i] = if sign > 0 {
                        values[i].wrapping_sub(t)
                    } else {
                        values[i].wrapping_add(t)
                    } & m;
                }
            }
        }
    }

    /// In place: `self /= (1 - sign q^e)` for `e >= 1`.
    pub fn div_binomial(&mut self, sign: i8, e: usize) {
        assert!(e >= 1, "binomial divisor needs a unit constant term");
        let len = self.len();
        if e >= len {
            return;
        }
        match &mut self.coeffs {
            Coeffs::Exact(v) => {
                for i in e..len {
                    let t = v[i - e].clone();
                    if sign > 0 {
                        v[i] += t;
                    } else {
                        v[i] -= t;
                    }
                }
            }
            Coeffs::Residue { bits, values } => {
                let m = mask(*bits);
                for i in e..len {
                    let t = values[i - e];
                    values[i] = if sign > 0 {
                        values[i].wrapping_add(t)
                    } else {
                        values[i].wrapping_sub(t)
                    } & m;
                }
            }
        }
    }

    /// Adds `coeff` to the coefficient of `q^i` (ignored past the order).
    pub fn add_term(&mut self, i: usize, coeff: i64) {
        if i >= self.len() {
            return;
        }
        match &mut self.coeffs {
            Coeffs::Exact(v) => v[i] += coeff,
            Coeffs::Residue { bits, values } => {
                values[i] = values[i].wrapping_add(coeff as u64 as u32) & mask(*bits)
            }
        }
    }

    /// First index at which the two series differ, compared up to the
    /// smaller order.
    pub fn first_difference(&self, other: &Self) -> Result<Option<usize>, SeriesError> {
        self.check_ring(other)?;
        let len = self.len().min(other.len());
        Ok(match (&self.coeffs, &other.coeffs) {
            (Coeffs::Exact(a), Coeffs::Exact(b)) => (0..len).find(|&i| a[i] != b[i]),
            (Coeffs::Residue { values: a, .. }, Coeffs::Residue { values: b, .. }) => {
                (0..len).find(|&i| a[i] != b[i])
            }
            _ => unreachable!(),
        })
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, abs) = (c.is_negative(), c.abs());
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (i, abs.is_one()) {
                (0, _) => write!(f, "{}", abs)?,
                (1, true) => f.write_str("q")?,
                (1, false) => write!(f, "{}q", abs)?,
                (_, true) => write!(f, "q^{}", i)?,
                (_, false) => write!(f, "{}q^{}", abs, i)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(q^{})", self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn ex(c: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_i64s(Ring::Exact, c)
    }

    #[test]
    fn add_cancels_and_truncates() {
        assert_eq!(ex(&[1, 1]).add(&ex(&[1, -1])).unwrap(), ex(&[2, 0]));
        let s = ex(&[3, -4, 5]);
        assert_eq!(s.add(&TruncatedSeries::zero(Ring::Exact, 2)).unwrap(), s);
        assert_eq!(ex(&[1, 2, 3]).add(&ex(&[1, 1])).unwrap(), ex(&[2, 3]));
    }

    #[test]
    fn mixed_rings_are_rejected() {
        let a = ex(&[1, 2]);
        let b = TruncatedSeries::from_i64s(Ring::Mod2k(2), &[1, 2]);
        assert!(matches!(a.add(&b), Err(SeriesError::RingMismatch { .. })));
        assert!(matches!(a.mul(&b), Err(SeriesError::RingMismatch { .. })));
        assert!(matches!(a.div_unit(&b), Err(SeriesError::RingMismatch { .. })));
    }

    #[test]
    fn geometric_series_inverse() {
        let n = 10;
        let geom = ex(&vec![1; n + 1]);
        let mut one_minus_q = TruncatedSeries::one(Ring::Exact, n);
        one_minus_q.add_term(1, -1);
        assert_eq!(one_minus_q.mul(&geom).unwrap(), TruncatedSeries::one(Ring::Exact, n));
        assert_eq!(ex(&[1, 1, 0]).mul(&ex(&[1, 1, 0])).unwrap(), ex(&[1, 2, 1]));
    }

    #[test]
    fn division_examples() {
        let one = TruncatedSeries::one(Ring::Exact, 5);
        assert_eq!(one.div_unit(&ex(&[1, -1, 0, 0, 0, 0])).unwrap(), ex(&[1; 6]));
        assert_eq!(ex(&[1, 0, -1]).div_unit(&ex(&[1, -1, 0])).unwrap(), ex(&[1, 1, 0]));
        assert!(matches!(
            one.div_unit(&ex(&[2, 1, 0, 0, 0, 0])),
            Err(SeriesError::NonUnit { .. })
        ));
        let even = TruncatedSeries::from_i64s(Ring::Mod2k(3), &[2, 1]);
        let one8 = TruncatedSeries::one(Ring::Mod2k(3), 1);
        assert!(one8.div_unit(&even).is_err());
        // -1 is a unit over the integers
        assert_eq!(ex(&[1, 0]).div_unit(&ex(&[-1, 1])).unwrap(), ex(&[-1, -1]));
    }

    #[test]
    fn ap_extract_examples() {
        assert_eq!(ex(&[1, 2, 3, 4]).ap_extract(2, 1).unwrap(), ex(&[2, 4]));
        let s = ex(&[5, 6, 7]);
        assert_eq!(s.ap_extract(1, 0).unwrap(), s);
        assert!(s.ap_extract(2, 2).is_err());
        assert!(s.ap_extract(0, 0).is_err());
        // order floor((N - r)/m)
        assert_eq!(ex(&[0; 11]).ap_extract(3, 2).unwrap().order(), 2);
    }

    #[test]
    fn substitute_power_examples() {
        assert_eq!(ex(&[1, 1]).substitute_power(2, 100), ex(&[1, 0, 1, 0]));
        let s = ex(&[1, 2, 3]);
        assert_eq!(s.substitute_power(1, 100), s);
        assert_eq!(s.substitute_power(3, 4), ex(&[1, 0, 0, 2, 0]));
    }

    #[test]
    fn reduce_mod_examples() {
        assert_eq!(ex(&[2, 4]).reduce_mod(1).unwrap().is_zero(), true);
        let r = ex(&[-1, 5, -6]).reduce_mod(2).unwrap();
        assert_eq!(r.coefficients(), [3, 1, 2].map(BigInt::from).to_vec());
        assert!(r.reduce_mod(3).is_err());
        assert_eq!(r.reduce_mod(1).unwrap().coefficients(), [1, 1, 0].map(BigInt::from).to_vec());
        assert!(ex(&[1]).reduce_mod(0).is_err());
    }

    #[test]
    fn binomials_round_trip() {
        let mut s = ex(&[1, 2, 3, 4, 5, 6, 7]);
        let orig = s.clone();
        s.mul_binomial(-1, 2);
        s.mul_binomial(1, 3);
        s.div_binomial(-1, 2);
        s.div_binomial(1, 3);
        assert_eq!(s, orig);
        s.mul_binomial(-1, 0);
        assert_eq!(s, orig.scale_i64(2));
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let a: Vec<BigInt> = (0..300).map(|i| BigInt::from((i * 7919 % 23) as i64 - 11)).collect();
        let b: Vec<BigInt> = (0..257).map(|i| BigInt::from((i * 104729 % 19) as i64 - 9)).collect();
        assert_eq!(karatsuba(&a, &b), schoolbook_full(&a, &b));
        let a: Vec<u32> = (0..500u32).map(|i| i.wrapping_mul(2654435761)).collect();
        let b: Vec<u32> = (0..131u32).map(|i| i.wrapping_mul(40503)).collect();
        assert_eq!(karatsuba(&a, &b), schoolbook_full(&a, &b));
    }

    #[test]
    fn dense_product_above_threshold_is_exact() {
        let n = KARATSUBA_THRESHOLD + 100;
        let a: Vec<i64> = (0..=n).map(|i| (i % 5) as i64 - 2).collect();
        let b: Vec<i64> = (0..=n).map(|i| (i % 3) as i64 - 1).collect();
        let ring = Ring::Mod2k(4);
        let fast = TruncatedSeries::from_i64s(ring, &a)
            .mul(&TruncatedSeries::from_i64s(ring, &b))
            .unwrap();
        let slow: Vec<u32> = {
            let av: Vec<u32> = a.iter().map(|&x| reduce_i64(x, 4)).collect();
            let bv: Vec<u32> = b.iter().map(|&x| reduce_i64(x, 4)).collect();
            let mut f = schoolbook_full(&av, &bv);
            f.truncate(n + 1);
            f.into_iter().map(|x| x & 15).collect()
        };
        assert_eq!(fast.coefficients(), slow.into_iter().map(BigInt::from).collect::<Vec<_>>());
    }

    #[test]
    fn display_form() {
        assert_eq!(ex(&[1, -1, -1, 0]).to_string(), "1 - q - q^2 + O(q^4)");
        assert_eq!(ex(&[0, 0]).to_string(), "0 + O(q^2)");
        assert_eq!(ex(&[-2, 0, 3]).to_string(), "-2 + 3q^2 + O(q^3)");
    }
}
