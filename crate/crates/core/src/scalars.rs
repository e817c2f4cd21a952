//! Exact arithmetic in ℚ(q).
//!
//! A [`ScalarQ`] is kept as `scale * num / den` where `num` and `den` are
//! primitive integer polynomials with positive leading coefficients and no
//! common factor, and `scale` is a rational. Read as a fraction of
//! rational-coefficient polynomials this is exactly `(scale*num) / den` with
//! an integer-primitive, positive-leading denominator, so two values are
//! equal iff their representations are structurally equal.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{self, Fp};
use crate::zpoly::{self, ZPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at the evaluation point")]
    PoleAtPoint,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Polynomial in q with rational coefficients; index `k` holds the
/// coefficient of `q^k` and there are no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Nonzero `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn from_z(scale: &BigRational, p: &[BigInt]) -> Self {
        QPoly::from_coeffs(p.iter().map(|c| scale * BigRational::from_integer(c.clone())).collect())
    }
}

/// Element of ℚ(q) in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarQ {
    scale: BigRational,
    num: ZPoly,
    den: ZPoly,
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

impl ScalarQ {
    pub fn zero() -> Self {
        ScalarQ { scale: BigRational::zero(), num: zpoly::one(), den: zpoly::one() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(ratio(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        ScalarQ { scale: r, num: zpoly::one(), den: zpoly::one() }
    }

    /// The indeterminate q.
    pub fn q() -> Self {
        Self::q_pow(1)
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(k: i32) -> Self {
        let mono = |e: u32| {
            let mut v = vec![BigInt::zero(); e as usize];
            v.push(BigInt::one());
            v
        };
        let (num, den) = if k >= 0 { (mono(k as u32), zpoly::one()) } else { (zpoly::one(), mono(k.unsigned_abs())) };
        ScalarQ { scale: BigRational::one(), num, den }
    }

    /// λ = q − q⁻¹.
    pub fn lambda() -> Self {
        Self::q() - Self::q_pow(-1)
    }

    /// ν = q + q⁻¹.
    pub fn nu() -> Self {
        Self::q() + Self::q_pow(-1)
    }

    /// Builds `scale * num / den` from arbitrary integer polynomials.
    fn normalized(scale: BigRational, num: ZPoly, den: ZPoly) -> Result<Self, ScalarError> {
        if den.is_empty() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_empty() || scale.is_zero() {
            return Ok(Self::zero());
        }
        let (cn, mut num) = zpoly::primitive(&num);
        let (cd, mut den) = zpoly::primitive(&den);
        let scale = scale * ratio(cn, cd);
        if !(zpoly::is_one(&num) || zpoly::is_one(&den)) {
            let g = zpoly::gcd(&num, &den);
            if !zpoly::is_one(&g) {
                num = zpoly::div_exact(&num, &g);
                den = zpoly::div_exact(&den, &g);
            }
        }
        Ok(ScalarQ { scale, num, den })
    }

    /// Builds `num / den` from rational polynomials.
    pub fn from_polys(num: &QPoly, den: &QPoly) -> Result<Self, ScalarError> {
        let (sn, zn) = to_zpoly(num);
        let (sd, zd) = to_zpoly(den);
        if zd.is_empty() {
            return Err(ScalarError::DivisionByZero);
        }
        Self::normalized(sn / sd, zn, zd)
    }

    pub fn is_zero(&self) -> bool {
        self.scale.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.scale.is_one() && zpoly::is_one(&self.num) && zpoly::is_one(&self.den)
    }

    /// True when the value does not depend on q.
    pub fn is_constant(&self) -> bool {
        self.num.len() == 1 && self.den.len() == 1
    }

    /// Numerator as a rational-coefficient polynomial.
    pub fn num(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        QPoly::from_z(&self.scale, &self.num)
    }

    /// Denominator: integer-primitive with positive leading coefficient.
    pub fn den(&self) -> QPoly {
        QPoly::from_z(&BigRational::one(), &self.den)
    }

    /// Rough size measure used for pivot selection.
    pub fn complexity(&self) -> usize {
        if self.is_zero() {
            return 0;
        }
        let bits: u64 = self.num.iter().chain(self.den.iter()).map(|c| c.bits()).sum();
        (self.num.len() + self.den.len()) * 64 + bits as usize + (self.scale.numer().bits() + self.scale.denom().bits()) as usize
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(ScalarQ { scale: self.scale.recip(), num: self.den.clone(), den: self.num.clone() })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: i32) -> Result<Self, ScalarError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Exact evaluation at a rational point.
    pub fn evaluate(&self, q0: &BigRational) -> Result<BigRational, ScalarError> {
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        let d = QPoly::from_z(&BigRational::one(), &self.den).eval(q0);
        if d.is_zero() {
            return Err(ScalarError::PoleAtPoint);
        }
        let n = QPoly::from_z(&self.scale, &self.num).eval(q0);
        Ok(n / d)
    }

    /// Floating-point evaluation at a complex point.
    pub fn evaluate_complex(&self, q0: Complex64) -> Result<Complex64, ScalarError> {
        if self.is_zero() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let horner = |p: &[BigInt]| {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in p.iter().rev() {
                acc = acc * q0 + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
            }
            acc
        };
        let d = horner(&self.den);
        let scale_d: f64 = self.den.iter().map(|c| c.to_f64().unwrap_or(f64::NAN).abs()).sum();
        if d.norm() <= 1e-12 * scale_d.max(1.0) {
            return Err(ScalarError::PoleAtPoint);
        }
        let s = self.scale.to_f64().unwrap_or(f64::NAN);
        Ok(horner(&self.num) * s / d)
    }

    /// Evaluation in the prime field [`Fp`], for fast specialized checks.
    pub fn evaluate_fp(&self, q0: Fp) -> Result<Fp, ScalarError> {
        if self.is_zero() {
            return Ok(Fp(0));
        }
        let horner = |p: &[BigInt]| {
            let mut acc = Fp(0);
            for c in p.iter().rev() {
                acc = linalg::Field::plus(&linalg::Field::times(&acc, &q0), &Fp::from_int(c));
            }
            acc
        };
        let d = horner(&self.den);
        let di = linalg::Field::try_inv(&d).ok_or(ScalarError::PoleAtPoint)?;
        let s = Fp::from_rational(&self.scale).ok_or(ScalarError::PoleAtPoint)?;
        Ok(linalg::Field::times(&linalg::Field::times(&s, &horner(&self.num)), &di))
    }

    /// Value at q = 1 of the reduced fraction.
    pub fn limit_at_one(&self) -> Result<BigRational, ScalarError> {
        self.evaluate(&BigRational::one())
    }

    /// The sign of the leading rational numerator coefficient (0 for zero).
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.scale.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn parse(text: &str) -> Result<Self, ScalarError> {
        Parser::new(text).parse_all()
    }
}

fn to_zpoly(p: &QPoly) -> (BigRational, ZPoly) {
    if p.is_zero() {
        return (BigRational::one(), Vec::new());
    }
    let mut l = BigInt::one();
    for (_, c) in p.terms() {
        l = l.lcm(c.denom());
    }
    let z: ZPoly = p.coeffs.iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    (ratio(BigInt::one(), l), z)
}

impl Default for ScalarQ {
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a> Add<&'a ScalarQ> for &'a ScalarQ {
    type Output = ScalarQ;

    fn add(self, rhs: &ScalarQ) -> ScalarQ {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (n1, d1) = (self.scale.numer(), self.scale.denom());
        let (n2, d2) = (rhs.scale.numer(), rhs.scale.denom());
        let l = d1.lcm(d2);
        let c1 = n1 * (&l / d1);
        let c2 = n2 * (&l / d2);
        let inv_l = ratio(BigInt::one(), l);
        if self.den == rhs.den {
            let num = zpoly::add(&zpoly::scale(&self.num, &c1), &zpoly::scale(&rhs.num, &c2));
            return ScalarQ::normalized(inv_l, num, self.den.clone()).expect("nonzero denominator");
        }
        let g = zpoly::gcd(&self.den, &rhs.den);
        let a = zpoly::div_exact(&self.den, &g);
        let b = zpoly::div_exact(&rhs.den, &g);
        let num = zpoly::add(
            &zpoly::scale(&zpoly::mul(&self.num, &b), &c1),
            &zpoly::scale(&zpoly::mul(&rhs.num, &a), &c2),
        );
        let den = zpoly::mul(&zpoly::mul(&a, &b), &g);
        ScalarQ::normalized(inv_l, num, den).expect("nonzero denominator")
    }
}

impl<'a> Sub<&'a ScalarQ> for &'a ScalarQ {
    type Output = ScalarQ;

    fn sub(self, rhs: &ScalarQ) -> ScalarQ {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ScalarQ> for &'a ScalarQ {
    type Output = ScalarQ;

    fn mul(self, rhs: &ScalarQ) -> ScalarQ {
        if self.is_zero() || rhs.is_zero() {
            return ScalarQ::zero();
        }
        let scale = &self.scale * &rhs.scale;
        if zpoly::is_one(&self.num) && zpoly::is_one(&self.den) {
            return ScalarQ { scale, num: rhs.num.clone(), den: rhs.den.clone() };
        }
        if zpoly::is_one(&rhs.num) && zpoly::is_one(&rhs.den) {
            return ScalarQ { scale, num: self.num.clone(), den: self.den.clone() };
        }
        // cross-cancel; operands are already reduced
        let g1 = zpoly::gcd(&self.num, &rhs.den);
        let g2 = zpoly::gcd(&rhs.num, &self.den);
        let n1 = zpoly::div_exact(&self.num, &g1);
        let d2 = zpoly::div_exact(&rhs.den, &g1);
        let n2 = zpoly::div_exact(&rhs.num, &g2);
        let d1 = zpoly::div_exact(&self.den, &g2);
        ScalarQ { scale, num: zpoly::mul(&n1, &n2), den: zpoly::mul(&d1, &d2) }
    }
}

impl Neg for &ScalarQ {
    type Output = ScalarQ;

    fn neg(self) -> ScalarQ {
        ScalarQ { scale: -&self.scale, num: self.num.clone(), den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ScalarQ> for ScalarQ {
            type Output = ScalarQ;
            fn $m(self, rhs: ScalarQ) -> ScalarQ {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ScalarQ {
    type Output = ScalarQ;
    fn neg(self) -> ScalarQ {
        -&self
    }
}

impl From<i64> for ScalarQ {
    fn from(v: i64) -> Self {
        ScalarQ::from_int(v)
    }
}

// ---------------------------------------------------------------------------
// Text form

fn write_poly(f: &mut fmt::Formatter<'_>, p: &[BigInt]) -> fmt::Result {
    let mut first = true;
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        match (k, mag.is_one()) {
            (0, _) => write!(f, "{mag}")?,
            (1, true) => f.write_str("q")?,
            (1, false) => write!(f, "{mag}*q")?,
            (_, true) => write!(f, "q^{k}")?,
            (_, false) => write!(f, "{mag}*q^{k}")?,
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Canonical text: expanded integer numerator and denominator in decreasing
/// powers of q, `(num)/(den)`, with the denominator omitted when it is 1.
impl fmt::Display for ScalarQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let num = zpoly::scale(&self.num, self.scale.numer());
        let den = zpoly::scale(&self.den, self.scale.denom());
        if zpoly::is_one(&den) {
            return write_poly(f, &num);
        }
        f.write_str("(")?;
        write_poly(f, &num)?;
        f.write_str(")/(")?;
        write_poly(f, &den)?;
        f.write_str(")")
    }
}

impl fmt::Debug for ScalarQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarQ({self})")
    }
}

impl FromStr for ScalarQ {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ScalarQ::parse(s)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { src: text.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: &str) -> Result<T, ScalarError> {
        Err(ScalarError::Parse { pos: self.pos, msg: msg.into() })
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

    fn parse_all(mut self) -> Result<ScalarQ, ScalarError> {
        if self.peek().is_none() {
            return self.err("empty input");
        }
        let v = self.expr()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<ScalarQ, ScalarError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ScalarQ, ScalarError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                &acc * &rhs
            } else {
                acc.checked_div(&rhs).map_err(|_| ScalarError::Parse { pos: at, msg: "division by zero".into() })?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<ScalarQ, ScalarError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ScalarQ, ScalarError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let e = self.signed_int()?;
            let e: i32 = e.to_i32().ok_or(ScalarError::Parse { pos: at, msg: "exponent out of range".into() })?;
            return base.pow(e).map_err(|_| ScalarError::Parse { pos: at, msg: "negative power of zero".into() });
        }
        Ok(base)
    }

    fn signed_int(&mut self) -> Result<BigInt, ScalarError> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let v = self.integer()?;
        Ok(if neg { -v } else { v })
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse::<BigInt>().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<ScalarQ, ScalarError> {
        match self.peek() {
            Some(b'q') => {
                self.pos += 1;
                Ok(ScalarQ::q())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(ScalarQ::from_rational(BigRational::from_integer(v)))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn s(t: &str) -> ScalarQ {
        ScalarQ::parse(t).unwrap()
    }

    #[test]
    fn cancellation_reduces_to_polynomial() {
        assert_eq!(s("(q^2-1)/(q-1)"), s("q+1"));
    }

    #[test]
    fn lambda_has_common_denominator() {
        assert_eq!(ScalarQ::lambda().to_string(), "(q^2 - 1)/(q)");
    }

    #[test]
    fn lambda_squared_expands() {
        // (q - 1/q)^2 = q^2 - 2 + q^-2 = (q^4 - 2q^2 + 1)/q^2
        let l = ScalarQ::lambda();
        assert_eq!((&l * &l).to_string(), "(q^4 - 2*q^2 + 1)/(q^2)");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(ScalarQ::one().checked_div(&ScalarQ::zero()), Err(ScalarError::DivisionByZero));
        assert!(matches!(ScalarQ::parse("1/(q-q)"), Err(ScalarError::Parse { .. })));
    }

    #[test]
    fn evaluation_examples() {
        let two = BigRational::from_integer(2.into());
        assert_eq!(s("(q^2-1)/q").evaluate(&two).unwrap(), ratio(3.into(), 2.into()));
        assert_eq!(s("(q^2-1)/(q-1)").evaluate(&BigRational::one()).unwrap(), BigRational::from_integer(2.into()));
        assert_eq!(s("1/(q-1)").evaluate(&BigRational::one()), Err(ScalarError::PoleAtPoint));
    }

    #[test]
    fn limits_of_mu_parameters() {
        let l = ScalarQ::lambda();
        let mu1 = (&s("q^-2") - &ScalarQ::one()).checked_div(&l).unwrap();
        assert_eq!(mu1, s("-1/q"));
        assert_eq!(mu1.limit_at_one().unwrap(), BigRational::from_integer((-1).into()));
        let mu2 = (&s("q^2") - &ScalarQ::one()).checked_div(&l).unwrap();
        assert_eq!(mu2, ScalarQ::q());
        assert_eq!(mu2.limit_at_one().unwrap(), BigRational::one());
        let theta_coeff = -(ScalarQ::q().checked_div(&l).unwrap());
        assert_eq!(theta_coeff.limit_at_one(), Err(ScalarError::PoleAtPoint));
    }

    #[test]
    fn parse_and_format_examples() {
        let v = s("q^-2 - 1");
        assert_eq!(v.to_string(), "(-q^2 + 1)/(q^2)");
        assert_eq!(s("1/(q-q^-1)").to_string(), "(q)/(q^2 - 1)");
        assert_eq!(s("3/6").to_string(), "(1)/(2)");
        assert_eq!(s("2*q^3 - q").to_string(), "2*q^3 - q");
        assert_eq!(ScalarQ::zero().to_string(), "0");
    }

    #[test]
    fn parse_errors_carry_position() {
        match ScalarQ::parse("q + * 2") {
            Err(ScalarError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(ScalarQ::parse("").is_err());
        assert!(ScalarQ::parse("(q").is_err());
        assert!(ScalarQ::parse("q^x").is_err());
        assert!(ScalarQ::parse("q)").is_err());
    }

    #[test]
    fn denominator_is_primitive_positive() {
        let v = s("(2*q)/(-4*q^2 + 6)");
        let den = v.den();
        assert!(den.coeff(den.degree().unwrap()).is_positive());
        assert_eq!(v.to_string(), "(-q)/(2*q^2 - 3)");
    }
}
