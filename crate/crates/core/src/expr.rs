//! A small expression language for products and quotients of q-objects.
//!
//! ```text
//! expr      := term (('+' | '-') term)*
//! term      := factor (('*' | '/') factor)*
//! factor    := '-' factor | atom ('^' integer)?
//! atom      := integer | 'q^' integer | 'l' integer
//!            | 'phi(q^' integer ')' | 'psi(q^' integer ')'
//!            | 'f(' signedmono ',' signedmono ')'
//!            | 'poch(' signedmono (',' signedmono)* ';' 'q^' integer (';' integer)? ')'
//!            | '(' expr ')'
//! signedmono := '-'? 'q^' integer
//! ```
//!
//! Whitespace is ignored and a bare `q` is accepted for `q^1`. `poch(a, b; q^s)`
//! is the infinite product `(a; q^s)_inf (b; q^s)_inf`; a trailing `; n`
//! makes it finite. Printing produces the canonical text, and
//! `parse(print(e)) == e` for every tree the parser returns. A negated
//! integer literal such as `-3` parses as `Int(-3)`.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use crate::builders::{
    eta_series, jacobi_product_series, pochhammer_series, theta_series, BuildError, Length,
    PochhammerFactor, SignedMonomial, ThetaAtom,
};
use crate::series::{Ring, SeriesError, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QExpr {
    Int(i64),
    /// `q^s`
    Mono(u32),
    /// `l_n`
    Eta(u32),
    Theta(ThetaAtom),
    Poch {
        args: Vec<SignedMonomial>,
        step: u32,
        length: Length,
    },
    Neg(Box<QExpr>),
    Add(Box<QExpr>, Box<QExpr>),
    Sub(Box<QExpr>, Box<QExpr>),
    Mul(Box<QExpr>, Box<QExpr>),
    Div(Box<QExpr>, Box<QExpr>),
    Pow(Box<QExpr>, i64),
}

impl QExpr {
    pub fn mul(a: QExpr, b: QExpr) -> QExpr {
        QExpr::Mul(Box::new(a), Box::new(b))
    }
    pub fn div(a: QExpr, b: QExpr) -> QExpr {
        QExpr::Div(Box::new(a), Box::new(b))
    }
    pub fn add(a: QExpr, b: QExpr) -> QExpr {
        QExpr::Add(Box::new(a), Box::new(b))
    }
    pub fn sub(a: QExpr, b: QExpr) -> QExpr {
        QExpr::Sub(Box::new(a), Box::new(b))
    }
    pub fn pow(a: QExpr, e: i64) -> QExpr {
        QExpr::Pow(Box::new(a), e)
    }

    fn precedence(&self) -> u8 {
        match self {
            QExpr::Add(..) | QExpr::Sub(..) => 1,
            QExpr::Mul(..) | QExpr::Div(..) => 2,
            QExpr::Neg(_) => 3,
            QExpr::Int(n) if *n < 0 => 3,
            QExpr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_mono(f: &mut fmt::Formatter<'_>, m: &SignedMonomial) -> fmt::Result {
    if m.sign < 0 {
        f.write_str("-")?;
    }
    write!(f, "q^{}", m.exp)
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &QExpr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

impl fmt::Display for QExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QExpr::Int(n) => write!(f, "{}", n),
            QExpr::Mono(s) => write!(f, "q^{}", s),
            QExpr::Eta(n) => write!(f, "l{}", n),
            QExpr::Theta(ThetaAtom::Phi { scale }) => write!(f, "phi(q^{})", scale),
            QExpr::Theta(ThetaAtom::Psi { scale }) => write!(f, "psi(q^{})", scale),
            QExpr::Theta(ThetaAtom::General { c, d }) => {
                f.write_str("f(")?;
                write_mono(f, c)?;
                f.write_str(", ")?;
                write_mono(f, d)?;
                f.write_str(")")
            }
            QExpr::Poch { args, step, length } => {
                f.write_str("poch(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_mono(f, a)?;
                }
                write!(f, "; q^{}", step)?;
                if let Length::Finite(n) = length {
                    write!(f, "; {}", n)?;
                }
                f.write_str(")")
            }
            QExpr::Neg(x) => {
                f.write_str("-")?;
                write_operand(f, x, 3)
            }
            QExpr::Add(a, b) | QExpr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(if matches!(self, QExpr::Add(..)) { " + " } else { " - " })?;
                write_operand(f, b, 2)
            }
            QExpr::Mul(a, b) | QExpr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str(if matches!(self, QExpr::Mul(..)) { "*" } else { "/" })?;
                write_operand(f, b, 3)
            }
            QExpr::Pow(b, e) => {
                write_operand(f, b, 5)?;
                write!(f, "^{}", e)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    UnknownIdentifier(String),
    IntegerOverflow,
    InvalidArgument(String),
}

/// A syntax error at a byte offset of the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at position {}: ", self.position)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{}'", c),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::Expected(what) => write!(f, "expected {}", what),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier '{}'", id),
            ParseErrorKind::IntegerOverflow => f.write_str("integer literal out of range"),
            ParseErrorKind::InvalidArgument(msg) => f.write_str(msg),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, kind })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8, what: &'static str) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => self.err(ParseErrorKind::Expected(what)),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn unsigned(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.src.get(self.pos) {
                None => self.err(ParseErrorKind::UnexpectedEnd),
                Some(_) => self.err(ParseErrorKind::Expected("an integer")),
            };
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<u64>().map_err(|_| ParseError {
            position: start,
            kind: ParseErrorKind::IntegerOverflow,
        })
    }

    fn small(&mut self) -> Result<u32, ParseError> {
        let at = self.pos;
        let v = self.unsigned()?;
        u32::try_from(v).map_err(|_| ParseError {
            position: at,
            kind: ParseErrorKind::IntegerOverflow,
        })
    }

    fn signed(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(b'-');
        let at = self.pos;
        let v = self.unsigned()?;
        let v = i64::try_from(v).map_err(|_| ParseError {
            position: at,
            kind: ParseErrorKind::IntegerOverflow,
        })?;
        Ok(if neg { -v } else { v })
    }

    fn identifier(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_owned()
    }

    /// `q^k` or bare `q`, with the leading `q` already consumed.
    fn q_power(&mut self) -> Result<u32, ParseError> {
        if self.eat(b'^') {
            self.small()
        } else {
            Ok(1)
        }
    }

    fn expect_q_power(&mut self) -> Result<u32, ParseError> {
        let at = self.pos;
        let id = self.identifier();
        if id != "q" {
            self.pos = at;
            return self.err(ParseErrorKind::Expected("q^<integer>"));
        }
        self.q_power()
    }

    fn signed_mono(&mut self) -> Result<SignedMonomial, ParseError> {
        let sign = if self.eat(b'-') { -1 } else { 1 };
        let exp = self.expect_q_power()?;
        Ok(SignedMonomial { sign, exp })
    }

    fn expr(&mut self) -> Result<QExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = QExpr::add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = QExpr::sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<QExpr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = QExpr::mul(lhs, self.factor()?);
            } else if self.eat(b'/') {
                lhs = QExpr::div(lhs, self.factor()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<QExpr, ParseError> {
        if self.eat(b'-') {
            return Ok(match self.factor()? {
                QExpr::Int(n) if n > 0 => QExpr::Int(-n),
                other => QExpr::Neg(Box::new(other)),
            });
        }
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.signed()?;
            return Ok(QExpr::pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<QExpr, ParseError> {
        let c = match self.peek() {
            None => return self.err(ParseErrorKind::UnexpectedEnd),
            Some(c) => c,
        };
        if c.is_ascii_digit() {
            let at = self.pos;
            let v = self.unsigned()?;
            return i64::try_from(v).map(QExpr::Int).map_err(|_| ParseError {
                position: at,
                kind: ParseErrorKind::IntegerOverflow,
            });
        }
        if c == b'(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(b')', "')'")?;
            return Ok(e);
        }
        if !c.is_ascii_alphabetic() {
            return self.err(ParseErrorKind::UnexpectedChar(c as char));
        }
        let start = self.pos;
        let id = self.identifier();
        match id.as_str() {
            "q" => Ok(QExpr::Mono(self.q_power()?)),
            "l" => {
                let n = self.small()?;
                if n == 0 {
                    return Err(ParseError {
                        position: start,
                        kind: ParseErrorKind::InvalidArgument("eta index must be positive".into()),
                    });
                }
                Ok(QExpr::Eta(n))
            }
            "phi" | "psi" => {
                self.expect(b'(', "'('")?;
                let k = self.expect_q_power()?;
                self.expect(b')', "')'")?;
                if k == 0 {
                    return Err(ParseError {
                        position: start,
                        kind: ParseErrorKind::InvalidArgument(alloc::format!("{}(q^0) diverges", id)),
                    });
                }
                Ok(QExpr::Theta(if id == "phi" {
                    ThetaAtom::phi(k)
                } else {
                    ThetaAtom::psi(k)
                }))
            }
            "f" => {
                self.expect(b'(', "'('")?;
                let c = self.signed_mono()?;
                self.expect(b',', "','")?;
                let d = self.signed_mono()?;
                self.expect(b')', "')'")?;
                ThetaAtom::general((c.sign, c.exp), (d.sign, d.exp))
                    .map(QExpr::Theta)
                    .map_err(|e| ParseError {
                        position: start,
                        kind: ParseErrorKind::InvalidArgument(alloc::format!("{}", e)),
                    })
            }
            "poch" => self.poch(start),
            _ => Err(ParseError {
                position: start,
                kind: ParseErrorKind::UnknownIdentifier(id),
            }),
        }
    }

    fn poch(&mut self, start: usize) -> Result<QExpr, ParseError> {
        self.expect(b'(', "'('")?;
        let mut args = Vec::new();
        loop {
            args.push(self.signed_mono()?);
            if !self.eat(b',') {
                break;
            }
        }
        self.expect(b';', "';'")?;
        let step = self.expect_q_power()?;
        let length = if self.eat(b';') {
            Length::Finite(self.unsigned()? as usize)
        } else {
            Length::Infinite
        };
        self.expect(b')', "')'")?;
        for a in args.iter() {
            if let Err(e) = PochhammerFactor::new(a.sign, a.exp, step, length) {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::InvalidArgument(alloc::format!("{}", e)),
                });
            }
        }
        Ok(QExpr::Poch { args, step, length })
    }
}

pub fn parse_qexpr(text: &str) -> Result<QExpr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(c) => p.err(ParseErrorKind::UnexpectedChar(c as char)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalError {
    Series(SeriesError),
    Build(BuildError),
    /// A denominator whose constant term is not a unit (e.g. `1/q^2`, `1/2`).
    NonUnitDenominator(String),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Series(e) => write!(f, "{}", e),
            EvalError::Build(e) => write!(f, "{}", e),
            EvalError::NonUnitDenominator(d) => {
                write!(f, "denominator {} does not have a unit constant term", d)
            }
        }
    }
}

impl From<SeriesError> for EvalError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::NonUnit { constant, .. } => EvalError::NonUnitDenominator(constant),
            other => EvalError::Series(other),
        }
    }
}

impl From<BuildError> for EvalError {
    fn from(e: BuildError) -> Self {
        EvalError::Build(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum AtomKey {
    Eta(u32),
    Theta(ThetaAtom),
    Poch(Vec<SignedMonomial>, u32, Length),
}

/// Evaluates expressions at a fixed ring and order, memoizing eta, theta and
/// Pochhammer expansions. One evaluator per thread.
pub struct Evaluator {
    ring: Ring,
    order: usize,
    cache: BTreeMap<AtomKey, TruncatedSeries>,
}

impl Evaluator {
    pub fn new(ring: Ring, order: usize) -> Self {
        Evaluator {
            ring,
            order,
            cache: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn atom(&mut self, key: AtomKey) -> Result<TruncatedSeries, EvalError> {
        if let Some(s) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let s = match &key {
            AtomKey::Eta(n) => eta_series(*n, self.ring, self.order)?,
            AtomKey::Theta(t) => theta_series(t, self.ring, self.order)?,
            AtomKey::Poch(args, step, length) => {
                let mut acc = TruncatedSeries::one(self.ring, self.order);
                for a in args.iter() {
                    let f = PochhammerFactor::new(a.sign, a.exp, *step, *length)?;
                    acc = acc.mul(&pochhammer_series(&f, self.ring, self.order))?;
                }
                acc
            }
        };
        self.cache.insert(key, s.clone());
        Ok(s)
    }

    /// Theta function through its product form instead of its sum.
    pub fn theta_product(&mut self, t: &ThetaAtom) -> Result<TruncatedSeries, EvalError> {
        Ok(jacobi_product_series(t, self.ring, self.order)?)
    }

    pub fn eval(&mut self, e: &QExpr) -> Result<TruncatedSeries, EvalError> {
        match e {
            QExpr::Add(a, b) => Ok(self.eval(a)?.add(&self.eval(b)?)?),
            QExpr::Sub(a, b) => Ok(self.eval(a)?.sub(&self.eval(b)?)?),
            _ => self.eval_product(e),
        }
    }

    /// Flattens a product/quotient/power tree into `scalar * prod atom^mult`,
    /// then multiplies the numerator atoms one at a time and divides by the
    /// denominator atoms one at a time. Eta and theta atoms are sparse, so
    /// every step stays on the sparse convolution path.
    fn eval_product(&mut self, e: &QExpr) -> Result<TruncatedSeries, EvalError> {
        let mut factors: Vec<(&QExpr, i64)> = Vec::new();
        let mut negate = false;
        let mut shift: i64 = 0;
        flatten(e, 1, &mut factors, &mut negate, &mut shift);
        let mut scalar = BigInt::from(if negate { -1 } else { 1 });
        let mut numer: Vec<(TruncatedSeries, i64)> = Vec::new();
        let mut denom: Vec<(TruncatedSeries, i64)> = Vec::new();
        for (f, m) in factors {
            match f {
                QExpr::Int(n) if m > 0 => {
                    scalar *= BigInt::from(*n).pow(m as u32);
                    continue;
                }
                _ => {}
            }
            let s = match f {
                QExpr::Eta(n) => self.atom(AtomKey::Eta(*n))?,
                QExpr::Theta(t) => self.atom(AtomKey::Theta(*t))?,
                QExpr::Poch { args, step, length } => {
                    self.atom(AtomKey::Poch(args.clone(), *step, *length))?
                }
                QExpr::Int(n) => TruncatedSeries::monomial(self.ring, 0, *n, self.order),
                other => self.eval(other)?,
            };
            if m > 0 {
                numer.push((s, m));
            } else {
                denom.push((s, -m));
            }
        }
        if shift < 0 {
            return Err(EvalError::NonUnitDenominator(alloc::format!("q^{}", -shift)));
        }
        let mut acc = TruncatedSeries::monomial(self.ring, 0, 1, self.order).scale(&scalar);
        for (s, m) in numer.iter() {
            for _ in 0..*m {
                acc = acc.mul(s)?;
            }
        }
        for (s, m) in denom.iter() {
            for _ in 0..*m {
                acc = acc.div_unit(s)?;
            }
        }
        Ok(acc.shift(shift as usize))
    }
}

fn flatten<'e>(
    e: &'e QExpr,
    mult: i64,
    out: &mut Vec<(&'e QExpr, i64)>,
    negate: &mut bool,
    shift: &mut i64,
) {
    match e {
        QExpr::Mul(a, b) => {
            flatten(a, mult, out, negate, shift);
            flatten(b, mult, out, negate, shift);
        }
        QExpr::Div(a, b) => {
            flatten(a, mult, out, negate, shift);
            flatten(b, -mult, out, negate, shift);
        }
        QExpr::Pow(a, k) => flatten(a, mult * k, out, negate, shift),
        QExpr::Neg(a) => {
            if mult % 2 != 0 {
                *negate = !*negate;
            }
            flatten(a, mult, out, negate, shift);
        }
        QExpr::Mono(s) => *shift += *s as i64 * mult,
        QExpr::Int(1) => {}
        _ if mult == 0 => {}
        other => out.push((other, mult)),
    }
}

/// Evaluates `e` to `order` in `ring` with a fresh evaluator.
pub fn eval_qexpr(e: &QExpr, order: usize, ring: Ring) -> Result<TruncatedSeries, EvalError> {
    Evaluator::new(ring, order).eval(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use num_traits::ToPrimitive;

    fn coeffs(text: &str, order: usize, ring: Ring) -> Vec<i64> {
        let e = parse_qexpr(text).unwrap();
        eval_qexpr(&e, order, ring)
            .unwrap()
            .coefficients()
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_qexpr("l1*l8").unwrap(),
            QExpr::mul(QExpr::Eta(1), QExpr::Eta(8))
        );
        assert_eq!(
            parse_qexpr("f(-q^1,-q^5)").unwrap(),
            QExpr::Theta(ThetaAtom::general((-1, 1), (-1, 5)).unwrap())
        );
        assert_eq!(parse_qexpr("psi(q^6)").unwrap(), QExpr::Theta(ThetaAtom::psi(6)));
        assert_eq!(parse_qexpr(" q ").unwrap(), QExpr::Mono(1));
        assert_eq!(parse_qexpr("-3").unwrap(), QExpr::Int(-3));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_qexpr("l1 * foo(q)").unwrap_err();
        assert_eq!(e.position, 5);
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("foo".into()));
        assert_eq!(parse_qexpr("l1 +").unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse_qexpr("(l1").unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse_qexpr("l1 l2").unwrap_err().position, 3);
        assert!(parse_qexpr("l0").is_err());
        assert!(parse_qexpr("phi(q^0)").is_err());
        assert!(parse_qexpr("f(q^0, -q^0)").is_err());
        assert!(parse_qexpr("poch(q^0; q^2)").is_err());
        assert_eq!(
            parse_qexpr("99999999999999999999").unwrap_err().kind,
            ParseErrorKind::IntegerOverflow
        );
        assert_eq!(parse_qexpr("l1 # 2").unwrap_err().kind, ParseErrorKind::UnexpectedChar('#'));
    }

    #[test]
    fn canonical_printing() {
        for text in [
            "l4^5/(l1^2*l2*l8^2)",
            "2*psi(q^1)",
            "f(-q^1, -q^5)",
            "poch(q^4, -q^4, -q^4; q^4)",
            "poch(-q^0; q^2; 3)",
            "4*l1*l8 - q^1*l2",
        ] {
            let e = parse_qexpr(text).unwrap();
            assert_eq!(e.to_string(), text);
            assert_eq!(parse_qexpr(&e.to_string()).unwrap(), e);
        }
        assert_eq!(parse_qexpr("l1*(l2*l3)").unwrap().to_string(), "l1*(l2*l3)");
        assert_eq!(parse_qexpr("(-3)^2").unwrap().to_string(), "(-3)^2");
        assert_eq!(parse_qexpr("-(l1 + l2)").unwrap().to_string(), "-(l1 + l2)");
        assert_eq!(parse_qexpr("l1^-2").unwrap().to_string(), "l1^-2");
    }

    #[test]
    fn eval_examples() {
        assert_eq!(coeffs("l4^5/(l1^2*l2*l8^2)", 3, Ring::Exact), [1, 2, 6, 12]);
        // 2 psi(q) mod 4: 2 at the triangular numbers
        assert_eq!(
            coeffs("2*psi(q^1)", 10, Ring::Mod2k(2)),
            [2, 2, 0, 2, 0, 0, 2, 0, 0, 0, 2]
        );
        assert_eq!(coeffs("q^1*l2", 5, Ring::Exact), [0, 1, 0, -1, 0, -1]);
        assert_eq!(coeffs("l1", 2, Ring::Exact), [1, -1, -1]);
        assert_eq!(coeffs("phi(q^1)", 4, Ring::Exact), [1, 2, 0, 0, 2]);
        assert_eq!(coeffs("-l1 + 2", 2, Ring::Exact), [1, 1, 1]);
        assert_eq!(coeffs("(1 - q)^-1", 3, Ring::Exact), [1, 1, 1, 1]);
        assert_eq!(coeffs("poch(-q^0; q^2; 2)", 4, Ring::Exact), [2, 0, 2, 0, 0]);
    }

    #[test]
    fn non_unit_denominators() {
        let e = parse_qexpr("l1/q^2").unwrap();
        assert!(matches!(eval_qexpr(&e, 5, Ring::Exact), Err(EvalError::NonUnitDenominator(_))));
        let e = parse_qexpr("l1/2").unwrap();
        assert!(matches!(eval_qexpr(&e, 5, Ring::Exact), Err(EvalError::NonUnitDenominator(_))));
        let e = parse_qexpr("l1/(2 + q)").unwrap();
        assert!(matches!(eval_qexpr(&e, 5, Ring::Mod2k(3)), Err(EvalError::NonUnitDenominator(_))));
        // 3 is odd, hence a unit mod 8
        let e = parse_qexpr("1/3").unwrap();
        assert_eq!(
            eval_qexpr(&e, 0, Ring::Mod2k(3)).unwrap().coefficients()[0],
            BigInt::from(3)
        );
    }

    #[test]
    fn residue_and_exact_evaluation_agree() {
        let e = parse_qexpr("l2*l8^2/(l1^2*l4) - 3*q^2*psi(q^3)").unwrap();
        let exact = eval_qexpr(&e, 200, Ring::Exact).unwrap();
        let resid = eval_qexpr(&e, 200, Ring::Mod2k(4)).unwrap();
        assert_eq!(exact.reduce_mod(4).unwrap(), resid);
    }
}
