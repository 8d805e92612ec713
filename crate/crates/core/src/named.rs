//! The six generating functions under study, each in three independent
//! forms: a q-hypergeometric (or theta) sum, an infinite product, and an eta
//! quotient in the symbols `l_n = (q^n; q^n)_inf`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::builders::{
    divide_by_pochhammer, pochhammer_series, theta_series, Length, PochhammerFactor, ThetaAtom,
};
use crate::expr::{parse_qexpr, EvalError, Evaluator, QExpr};
use crate::series::{Ring, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeriesName {
    /// `g_k`: overpartition function times `phi(q^k)`.
    G(u32),
    H,
    T,
    M,
    R,
    S,
}

impl fmt::Display for SeriesName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesName::G(k) => write!(f, "g{}", k),
            SeriesName::H => f.write_str("h"),
            SeriesName::T => f.write_str("t"),
            SeriesName::M => f.write_str("m"),
            SeriesName::R => f.write_str("r"),
            SeriesName::S => f.write_str("s"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownSeries(pub String);

impl fmt::Display for UnknownSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown series '{}' (expected g<k>, h, t, m, r or s)", self.0)
    }
}

impl FromStr for SeriesName {
    type Err = UnknownSeries;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h" => Ok(SeriesName::H),
            "t" => Ok(SeriesName::T),
            "m" => Ok(SeriesName::M),
            "r" => Ok(SeriesName::R),
            "s" => Ok(SeriesName::S),
            _ => s
                .strip_prefix('g')
                .and_then(|k| k.parse::<u32>().ok())
                .filter(|&k| k >= 1)
                .map(SeriesName::G)
                .ok_or_else(|| UnknownSeries(s.into())),
        }
    }
}

/// `(sign q^offset; q^step)_{len_mul * n + len_add}` inside a summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteFactor {
    pub sign: i8,
    pub offset: u32,
    pub step: u32,
    pub len_mul: usize,
    pub len_add: usize,
}

const fn ff(sign: i8, offset: u32, step: u32, len_mul: usize, len_add: usize) -> FiniteFactor {
    FiniteFactor {
        sign,
        offset,
        step,
        len_mul,
        len_add,
    }
}

impl FiniteFactor {
    fn length(&self, n: usize) -> usize {
        self.len_mul * n + self.len_add
    }

    fn binomial_exponents(&self, from: usize, to: usize) -> impl Iterator<Item = usize> + '_ {
        (from..to).map(move |k| self.offset as usize + k * self.step as usize)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumSide {
    /// `sum_n q^{quad n^2 + lin n} prod(numerator) / prod(denominator)`.
    Hypergeometric {
        quad: usize,
        lin: usize,
        numerator: Vec<FiniteFactor>,
        denominator: Vec<FiniteFactor>,
    },
    /// A product prefactor times a theta function evaluated from its sum.
    ThetaTimes { prefactor: String, theta: ThetaAtom },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedSeries {
    pub name: SeriesName,
    pub sum_side: SumSide,
    /// Infinite-product form, in expression syntax.
    pub product_side: String,
    /// Eta-quotient form, in expression syntax.
    pub eta_form: String,
}

const OVERPARTITIONS: &str = "poch(-q^1; q^1)/poch(q^1; q^1)";

impl NamedSeries {
    pub fn get(name: SeriesName) -> NamedSeries {
        use SeriesName::*;
        let hyp = |quad, lin, numerator, denominator| SumSide::Hypergeometric {
            quad,
            lin,
            numerator,
            denominator,
        };
        let (sum_side, product_side, eta_form): (SumSide, String, String) = match name {
            G(k) => (
                SumSide::ThetaTimes {
                    prefactor: OVERPARTITIONS.into(),
                    theta: ThetaAtom::phi(k),
                },
                format!(
                    "poch(-q^1; q^1)*poch(-q^{k}; q^{k2})*poch(q^{k2}; q^{k2})\
                     /(poch(q^1; q^1)*poch(q^{k}; q^{k2})*poch(-q^{k2}; q^{k2}))",
                    k = k,
                    k2 = 2 * k
                ),
                format!(
                    "l2*l{}^5/(l1^2*l{}^2*l{}^2)",
                    2 * k,
                    k,
                    4 * k
                ),
            ),
            H => (
                hyp(0, 1, vec![ff(-1, 1, 1, 2, 0)], vec![ff(1, 1, 1, 2, 1)]),
                format!("{}*poch(q^4, -q^4, -q^4; q^4)", OVERPARTITIONS),
                "l2*l8^2/(l1^2*l4)".into(),
            ),
            T => (
                hyp(0, 1, vec![ff(-1, 1, 2, 1, 0)], vec![ff(1, 1, 1, 2, 1)]),
                format!("{}*poch(q^12, q^3, q^9; q^12)", OVERPARTITIONS),
                "l2*l3*l12/(l1^2*l6)".into(),
            ),
            M => (
                hyp(0, 1, vec![ff(-1, 1, 1, 2, 0)], vec![ff(1, 2, 2, 1, 0)]),
                format!("{}*poch(q^6, q^1, q^5; q^6)", OVERPARTITIONS),
                "l6^2/(l1*l3)".into(),
            ),
            R => (
                hyp(1, 1, vec![ff(-1, 2, 2, 1, 0)], vec![ff(1, 1, 1, 2, 1)]),
                "poch(-q^2; q^2)/poch(q^2; q^2)*poch(q^6, -q^1, -q^5; q^6)".into(),
                "l3*l12/(l1*l6)".into(),
            ),
            S => (
                // (-1; q^2)_n: the k = 0 factor is the scalar 2
                hyp(1, 1, vec![ff(-1, 0, 2, 1, 0)], vec![ff(1, 1, 1, 2, 0)]),
                "poch(-q^2; q^2)/poch(q^2; q^2)*poch(q^6, -q^3, -q^3; q^6)".into(),
                "l4*l6^5/(l2^2*l3^2*l12^2)".into(),
            ),
        };
        NamedSeries {
            name,
            sum_side,
            product_side,
            eta_form,
        }
    }

    pub fn product_expr(&self) -> QExpr {
        parse_qexpr(&self.product_side).expect("catalog product forms parse")
    }

    pub fn eta_expr(&self) -> QExpr {
        parse_qexpr(&self.eta_form).expect("catalog eta forms parse")
    }

    /// The sum side, stopping once a summand's lowest exponent passes `order`.
    pub fn sum_side_series(&self, ring: Ring, order: usize) -> Result<TruncatedSeries, EvalError> {
        match &self.sum_side {
            SumSide::ThetaTimes { prefactor, theta } => {
                let pre = parse_qexpr(prefactor).expect("catalog prefactors parse");
                let pre = Evaluator::new(ring, order).eval(&pre)?;
                Ok(pre.mul(&theta_series(theta, ring, order)?)?)
            }
            SumSide::Hypergeometric {
                quad,
                lin,
                numerator,
                denominator,
            } => Ok(hypergeometric_sum(
                *quad,
                *lin,
                numerator,
                denominator,
                ring,
                order,
            )),
        }
    }

    pub fn product_side_series(
        &self,
        ring: Ring,
        order: usize,
    ) -> Result<TruncatedSeries, EvalError> {
        Evaluator::new(ring, order).eval(&self.product_expr())
    }

    pub fn eta_form_series(&self, ring: Ring, order: usize) -> Result<TruncatedSeries, EvalError> {
        Evaluator::new(ring, order).eval(&self.eta_expr())
    }
}

/// Sums the summands incrementally: going from `n` to `n + 1` only the new
/// binomial factors of each finite Pochhammer symbol are applied.
fn hypergeometric_sum(
    quad: usize,
    lin: usize,
    numerator: &[FiniteFactor],
    denominator: &[FiniteFactor],
    ring: Ring,
    order: usize,
) -> TruncatedSeries {
    assert!(quad + lin > 0, "summand exponent must grow with n");
    let mut ratio = TruncatedSeries::one(ring, order);
    let mut total = TruncatedSeries::zero(ring, order);
    let mut lengths_num = vec![0usize; numerator.len()];
    let mut lengths_den = vec![0usize; denominator.len()];
    for n in 0.. {
        let lead = quad * n * n + lin * n;
        if lead > order {
            break;
        }
        for (f, len) in numerator.iter().zip(lengths_num.iter_mut()) {
            let target = f.length(n);
            for e in f.binomial_exponents(*len, target) {
                if e <= order {
                    ratio.mul_binomial(f.sign, e);
                }
            }
            *len = target;
        }
        for (f, len) in denominator.iter().zip(lengths_den.iter_mut()) {
            let target = f.length(n);
            for e in f.binomial_exponents(*len, target) {
                ratio.div_binomial(f.sign, e);
            }
            *len = target;
        }
        total = total
            .add(&ratio.shift(lead))
            .expect("summands share the ring");
    }
    total
}

/// One summand built from scratch, for cross-checking the incremental sum.
pub fn summand(
    numerator: &[FiniteFactor],
    denominator: &[FiniteFactor],
    shift: usize,
    n: usize,
    ring: Ring,
    order: usize,
) -> TruncatedSeries {
    let mut s = TruncatedSeries::one(ring, order);
    for f in numerator {
        let p = PochhammerFactor::new(f.sign, f.offset, f.step, Length::Finite(f.length(n)))
            .expect("catalog factors are valid");
        s = s.mul(&pochhammer_series(&p, ring, order)).expect("same ring");
    }
    for f in denominator {
        let p = PochhammerFactor::new(f.sign, f.offset, f.step, Length::Finite(f.length(n)))
            .expect("catalog factors are valid");
        divide_by_pochhammer(&mut s, &p);
    }
    s.shift(shift)
}

/// The fastest route to a named series: its eta quotient.
pub fn named_series(name: SeriesName, ring: Ring, order: usize) -> TruncatedSeries {
    NamedSeries::get(name)
        .eta_form_series(ring, order)
        .expect("eta quotients have unit denominators")
}

pub const ALL_SERIES: [SeriesName; 8] = [
    SeriesName::G(2),
    SeriesName::G(3),
    SeriesName::G(4),
    SeriesName::H,
    SeriesName::T,
    SeriesName::M,
    SeriesName::R,
    SeriesName::S,
];
