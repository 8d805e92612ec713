//! Series for the basic q-objects: Pochhammer products, eta symbols
//! `l_n = (q^n; q^n)_inf`, and Ramanujan's theta function `f(c, d)` with its
//! specializations `phi` and `psi`.

use core::fmt;

use crate::series::{Ring, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuildError {
    /// `(q^0; q^b)` with a `+` sign is identically zero.
    ZeroPochhammer,
    ZeroStep,
    /// Theta arguments must have exponents summing to at least one.
    DivergentTheta { c_exp: u32, d_exp: u32 },
    ZeroEtaIndex,
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::ZeroPochhammer => {
                f.write_str("(q^0; q^b) with positive sign is identically zero")
            }
            BuildError::ZeroStep => f.write_str("Pochhammer step must be at least 1"),
            BuildError::DivergentTheta { c_exp, d_exp } => write!(
                f,
                "theta f(q^{}, q^{}) needs exponents summing to at least 1",
                c_exp, d_exp
            ),
            BuildError::ZeroEtaIndex => f.write_str("eta symbol index must be at least 1"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Length {
    Finite(usize),
    Infinite,
}

/// `(sign * q^offset; q^step)_length`, i.e. the product of
/// `1 - sign * q^(offset + k * step)` over `k < length`.
///
/// `sign = -1` gives the "plus" products such as `(-q; q)_inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PochhammerFactor {
    sign: i8,
    offset: u32,
    step: u32,
    length: Length,
}

impl PochhammerFactor {
    /// `offset = 0` is only meaningful with `sign = -1`, as in `(-1; q^2)_n`.
    pub fn new(sign: i8, offset: u32, step: u32, length: Length) -> Result<Self, BuildError> {
        if step == 0 {
            return Err(BuildError::ZeroStep);
        }
        if offset == 0 && sign > 0 {
            return Err(BuildError::ZeroPochhammer);
        }
        Ok(PochhammerFactor {
            sign: if sign < 0 { -1 } else { 1 },
            offset,
            step,
            length,
        })
    }

    pub fn infinite(sign: i8, offset: u32, step: u32) -> Result<Self, BuildError> {
        Self::new(sign, offset, step, Length::Infinite)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }
    pub fn offset(&self) -> u32 {
        self.offset
    }
    pub fn step(&self) -> u32 {
        self.step
    }
    pub fn length(&self) -> Length {
        self.length
    }

    /// Exponents of the binomial factors that can affect terms up to `order`.
    /// The `q^0` factor (a scalar) is reported as exponent 0.
    pub fn exponents(&self, order: usize) -> impl Iterator<Item = usize> + '_ {
        let limit = match self.length {
            Length::Finite(n) => n,
            Length::Infinite => usize::MAX,
        };
        let (a, b) = (self.offset as usize, self.step as usize);
        (0..limit)
            .map(move |k| a + k * b)
            .take_while(move |&e| e <= order || (e == 0))
    }
}

/// Expands a Pochhammer product to `order`, omitting every binomial whose
/// exponent exceeds `order` (those factors are `1 + O(q^{order+1})`).
pub fn pochhammer_series(f: &PochhammerFactor, ring: Ring, order: usize) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(ring, order);
    for e in f.exponents(order) {
        s.mul_binomial(f.sign, e);
    }
    s
}

/// Divides `s` in place by a Pochhammer product with unit factors
/// (`offset >= 1`).
pub fn divide_by_pochhammer(s: &mut TruncatedSeries, f: &PochhammerFactor) {
    let order = s.order();
    for e in f.exponents(order) {
        s.div_binomial(f.sign, e);
    }
}

/// `l_n = (q^n; q^n)_inf`, expanded with Euler's pentagonal number theorem:
/// `sum_m (-1)^m q^{n m (3m - 1)/2}` over all integers `m`.
pub fn eta_series(n: u32, ring: Ring, order: usize) -> Result<TruncatedSeries, BuildError> {
    if n == 0 {
        return Err(BuildError::ZeroEtaIndex);
    }
    // the pentagonal sum is f(-q^n, -q^{2n})
    theta_series(&ThetaAtom::general((-1, n), (-1, 2 * n))?, ring, order)
}

/// `sign * q^exp`, one argument of a theta function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedMonomial {
    pub sign: i8,
    pub exp: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ThetaAtom {
    /// `f(c, d)` with monomial arguments.
    General { c: SignedMonomial, d: SignedMonomial },
    /// `phi(q^scale) = f(q^scale, q^scale)`.
    Phi { scale: u32 },
    /// `psi(q^scale) = f(q^scale, q^{3 scale})`.
    Psi { scale: u32 },
}

impl ThetaAtom {
    pub fn general(c: (i8, u32), d: (i8, u32)) -> Result<Self, BuildError> {
        if c.1 + d.1 == 0 {
            return Err(BuildError::DivergentTheta { c_exp: c.1, d_exp: d.1 });
        }
        let norm = |s: i8| if s < 0 { -1 } else { 1 };
        Ok(ThetaAtom::General {
            c: SignedMonomial { sign: norm(c.0), exp: c.1 },
            d: SignedMonomial { sign: norm(d.0), exp: d.1 },
        })
    }

    pub fn phi(scale: u32) -> Self {
        ThetaAtom::Phi { scale }
    }

    pub fn psi(scale: u32) -> Self {
        ThetaAtom::Psi { scale }
    }

    /// The two arguments `(c, d)` of `f(c, d)`.
    pub fn arguments(&self) -> (SignedMonomial, SignedMonomial) {
        let pos = |exp| SignedMonomial { sign: 1, exp };
        match *self {
            ThetaAtom::General { c, d } => (c, d),
            ThetaAtom::Phi { scale } => (pos(scale), pos(scale)),
            ThetaAtom::Psi { scale } => (pos(scale), pos(3 * scale)),
        }
    }

    fn validate(&self) -> Result<(), BuildError> {
        let (c, d) = self.arguments();
        if c.exp + d.exp == 0 {
            return Err(BuildError::DivergentTheta { c_exp: c.exp, d_exp: d.exp });
        }
        Ok(())
    }
}

fn triangular(m: i64) -> i64 {
    m * (m + 1) / 2
}

/// Theta series from its defining sum.
///
/// `phi` and `psi` use their one-sided forms `sum q^{k m^2}` and
/// `sum_{m >= 0} q^{k m(m+1)/2}`; a general `f(c, d)` runs the bilateral sum
/// `sum_m c^{m(m+1)/2} d^{m(m-1)/2}` outward from `m = 0` in both directions
/// until the (monotone) exponent passes `order`.
pub fn theta_series(
    atom: &ThetaAtom,
    ring: Ring,
    order: usize,
) -> Result<TruncatedSeries, BuildError> {
    atom.validate()?;
    let mut s = TruncatedSeries::zero(ring, order);
    match *atom {
        ThetaAtom::Phi { scale } => {
            let k = scale as usize;
            s.add_term(0, 1);
            for m in 1.. {
                let e = k * m * m;
                if e > order {
                    break;
                }
                s.add_term(e, 2);
            }
        }
        ThetaAtom::Psi { scale } => {
            let k = scale as usize;
            for m in 0.. {
                let e = k * m * (m + 1) / 2;
                if e > order {
                    break;
                }
                s.add_term(e, 1);
            }
        }
        ThetaAtom::General { c, d } => {
            let term = |m: i64| -> (i64, i64) {
                let tc = triangular(m);
                let td = triangular(m - 1);
                let exp = c.exp as i64 * tc + d.exp as i64 * td;
                let neg = (c.sign < 0 && tc % 2 == 1) ^ (d.sign < 0 && td % 2 == 1);
                (exp, if neg { -1 } else { 1 })
            };
            for dir in [1i64, -1] {
                let mut m = if dir > 0 { 0 } else { -1 };
                loop {
                    let (e, sign) = term(m);
                    if e > order as i64 {
                        break;
                    }
                    s.add_term(e as usize, sign);
                    m += dir;
                }
            }
        }
    }
    Ok(s)
}

/// Theta series through the Jacobi triple product
/// `f(c, d) = (-c; cd)_inf (-d; cd)_inf (cd; cd)_inf`.
///
/// The base `cd` may carry a sign (e.g. `f(q, -q^3)`), so the binomials are
/// generated directly rather than through [`PochhammerFactor`].
pub fn jacobi_product_series(
    atom: &ThetaAtom,
    ring: Ring,
    order: usize,
) -> Result<TruncatedSeries, BuildError> {
    atom.validate()?;
    let (c, d) = atom.arguments();
    let base_exp = (c.exp + d.exp) as usize;
    let base_sign = c.sign * d.sign;
    let mut s = TruncatedSeries::one(ring, order);
    // factor k of (-x; cd): 1 + x (cd)^k, i.e. 1 - (-sign_x * base_sign^k) q^{e_x + k e}
    for x in [c, d] {
        let mut sign_pow: i8 = 1;
        for k in 0.. {
            let e = x.exp as usize + k * base_exp;
            if e > order && e > 0 {
                break;
            }
            s.mul_binomial(-x.sign * sign_pow, e);
            sign_pow *= base_sign;
        }
    }
    // factor k of (cd; cd): 1 - base_sign^{k+1} q^{(k+1) e}
    let mut sign_pow = base_sign;
    for k in 1.. {
        let e = k * base_exp;
        if e > order {
            break;
        }
        s.mul_binomial(sign_pow, e);
        sign_pow *= base_sign;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn ints(s: &TruncatedSeries) -> Vec<i64> {
        use num_traits::ToPrimitive;
        s.coefficients().iter().map(|c| c.to_i64().unwrap()).collect()
    }

    #[test]
    fn finite_pochhammer() {
        let f = PochhammerFactor::new(1, 1, 1, Length::Finite(2)).unwrap();
        assert_eq!(ints(&pochhammer_series(&f, Ring::Exact, 4)), [1, -1, -1, 1, 0]);
        let special = PochhammerFactor::new(-1, 0, 2, Length::Finite(1)).unwrap();
        assert_eq!(ints(&pochhammer_series(&special, Ring::Exact, 3)), [2, 0, 0, 0]);
        let empty = PochhammerFactor::new(-1, 0, 2, Length::Finite(0)).unwrap();
        assert_eq!(ints(&pochhammer_series(&empty, Ring::Exact, 2)), [1, 0, 0]);
        assert_eq!(
            PochhammerFactor::new(1, 0, 2, Length::Finite(1)),
            Err(BuildError::ZeroPochhammer)
        );
        assert_eq!(PochhammerFactor::infinite(1, 1, 0), Err(BuildError::ZeroStep));
    }

    #[test]
    fn euler_product_small_order() {
        // (1-q)(1-q^2)...(1-q^7) expanded by hand
        let expected = [1, -1, -1, 0, 0, 1, 0, 1];
        let f = PochhammerFactor::infinite(1, 1, 1).unwrap();
        assert_eq!(ints(&pochhammer_series(&f, Ring::Exact, 7)), expected);
        assert_eq!(ints(&eta_series(1, Ring::Exact, 7).unwrap()), expected);
        assert_eq!(ints(&eta_series(2, Ring::Exact, 3).unwrap()), [1, 0, -1, 0]);
        assert_eq!(eta_series(0, Ring::Exact, 3), Err(BuildError::ZeroEtaIndex));
    }

    #[test]
    fn eta_matches_product_definition() {
        for n in 1..=12u32 {
            let f = PochhammerFactor::infinite(1, n, n).unwrap();
            assert_eq!(
                eta_series(n, Ring::Exact, 400).unwrap(),
                pochhammer_series(&f, Ring::Exact, 400),
                "l_{}",
                n
            );
        }
    }

    #[test]
    fn phi_and_psi_sums() {
        assert_eq!(
            ints(&theta_series(&ThetaAtom::phi(1), Ring::Exact, 9).unwrap()),
            [1, 2, 0, 0, 2, 0, 0, 0, 0, 2]
        );
        assert_eq!(
            ints(&theta_series(&ThetaAtom::psi(1), Ring::Exact, 10).unwrap()),
            [1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1]
        );
        let phi = ThetaAtom::general((1, 1), (1, 1)).unwrap();
        let psi = ThetaAtom::general((1, 1), (1, 3)).unwrap();
        for k in [1u32, 2, 5] {
            let gk = |a: ThetaAtom| match a {
                ThetaAtom::General { c, d } => ThetaAtom::general((c.sign, c.exp * k), (d.sign, d.exp * k)).unwrap(),
                _ => unreachable!(),
            };
            assert_eq!(
                theta_series(&gk(phi), Ring::Exact, 300).unwrap(),
                theta_series(&ThetaAtom::phi(k), Ring::Exact, 300).unwrap()
            );
            assert_eq!(
                theta_series(&gk(psi), Ring::Exact, 300).unwrap(),
                theta_series(&ThetaAtom::psi(k), Ring::Exact, 300).unwrap()
            );
        }
    }

    #[test]
    fn triple_product_agrees_with_sum() {
        let atoms = [
            ThetaAtom::phi(1),
            ThetaAtom::psi(1),
            ThetaAtom::phi(3),
            ThetaAtom::general((-1, 1), (-1, 2)).unwrap(),
            ThetaAtom::general((-1, 1), (-1, 5)).unwrap(),
            ThetaAtom::general((1, 2), (-1, 7)).unwrap(),
            ThetaAtom::general((-1, 3), (1, 3)).unwrap(),
            ThetaAtom::general((1, 0), (1, 4)).unwrap(),
        ];
        for a in atoms.iter() {
            assert_eq!(
                theta_series(a, Ring::Exact, 500).unwrap(),
                jacobi_product_series(a, Ring::Exact, 500).unwrap(),
                "{:?}",
                a
            );
        }
    }

    #[test]
    fn divergent_theta_rejected() {
        assert!(ThetaAtom::general((1, 0), (-1, 0)).is_err());
        assert!(theta_series(&ThetaAtom::phi(0), Ring::Exact, 3).is_err());
    }
}
