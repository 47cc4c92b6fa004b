//! Coefficient ring: rational functions over ℚ in coordinates x1..xn.
//!
//! A [`Scalar`] is kept as `num/den` with `gcd(num, den) = 1` and `den`
//! monic under graded-lex order, so structural equality is mathematical
//! equality.

mod parse;
pub mod poly;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use poly::{monomials_up_to, Monomial, Poly, MAX_VARS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by the zero scalar")]
    DivisionByZero,
    #[error("variable index {index} out of range for {n} coordinates")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("point has {got} coordinates, expected {n}")]
    PointDimension { got: usize, n: usize },
    #[error("pole at the evaluation point")]
    PoleAtPoint,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("at most {MAX_VARS} coordinates are supported, got {0}")]
    TooManyVariables(usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Scalar {
        Scalar::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> Scalar {
        Scalar { num, den: Poly::one() }
    }

    pub fn from_rational(c: BigRational) -> Scalar {
        Scalar::from_poly(Poly::constant(c))
    }

    pub fn from_int(c: i64) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(BigRational::new(n.into(), d.into()))
    }

    /// The coordinate function x_{i+1}.
    pub fn var(i: usize) -> Scalar {
        Scalar::from_poly(Poly::var(i))
    }

    pub fn monomial(m: Monomial) -> Scalar {
        Scalar::from_poly(Poly::term(m, BigRational::one()))
    }

    /// Canonical form of `num / den`.
    pub fn from_fraction(num: Poly, den: Poly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = den.as_constant() {
            return Scalar::from_poly(num.scale(&c.recip()));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coefficient();
        if lc.is_one() {
            Scalar { num, den }
        } else {
            let inv = lc.recip();
            let den = den.scale(&inv);
            if den.is_constant() {
                Scalar::from_poly(num.scale(&inv))
            } else {
                Scalar { num: num.scale(&inv), den }
            }
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Highest coordinate index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.num.max_var().max(self.den.max_var())
    }

    pub fn scale_rational(&self, c: &BigRational) -> Scalar {
        Scalar { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.mul_ref(&other.inverse_unchecked()))
    }

    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(self.inverse_unchecked())
    }

    fn inverse_unchecked(&self) -> Scalar {
        if let Some(c) = self.num.as_constant() {
            return Scalar::from_poly(self.den.scale(&c.recip()));
        }
        // Swapping keeps gcd = 1; only the leading coefficient needs fixing.
        let lc = self.num.leading_coefficient().recip();
        Scalar { num: self.den.scale(&lc), den: self.num.scale(&lc) }
    }

    fn add_ref(&self, other: &Scalar) -> Scalar {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if self.den.is_one() {
                return Scalar::from_poly(num);
            }
            return Scalar::reduce(num, self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Scalar::reduce(num, self.den.mul(&other.den))
    }

    fn sub_ref(&self, other: &Scalar) -> Scalar {
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.sub(&other.num);
            if self.den.is_one() {
                return Scalar::from_poly(num);
            }
            return Scalar::reduce(num, self.den.clone());
        }
        let num = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        Scalar::reduce(num, self.den.mul(&other.den))
    }

    fn mul_ref(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Scalar::from_poly(self.num.mul(&other.num));
        }
        Scalar::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    /// Partial derivative in the 0-based coordinate `var`.
    pub fn derivative(&self, var: usize) -> Scalar {
        if self.den.is_one() {
            return Scalar::from_poly(self.num.derivative(var));
        }
        let num = self
            .num
            .derivative(var)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(var)));
        Scalar::reduce(num, self.den.mul(&self.den))
    }

    pub fn pow(&self, e: i32) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(Scalar { num: base.num.pow(e), den: base.den.pow(e) })
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$inner(rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$inner(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$inner(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

/// Panics on division by zero; use [`Scalar::checked_div`] for fallible division.
impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by the zero scalar")
    }
}

impl Div<Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<i64> for Scalar {
    fn from(c: i64) -> Scalar {
        Scalar::from_int(c)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &Poly| p.terms().len() > 1 || !p.terms()[0].1.is_one();
        if wrap(&self.num) {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if wrap(&self.den) {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::str::FromStr for Scalar {
    type Err = ScalarError;
    fn from_str(s: &str) -> Result<Scalar, ScalarError> {
        parse::parse(s, MAX_VARS)
    }
}

/// The ring of rational functions in a fixed number of coordinates.
///
/// Checked entry points (parsing, derivatives, evaluation) validate
/// variable indices against `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScalarRing {
    n: usize,
}

impl ScalarRing {
    pub fn new(n: usize) -> Result<ScalarRing, ScalarError> {
        if n > MAX_VARS {
            return Err(ScalarError::TooManyVariables(n));
        }
        Ok(ScalarRing { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Parses `x1..xn` expressions with `+ - * / ^` and rational literals.
    pub fn parse(&self, text: &str) -> Result<Scalar, ScalarError> {
        parse::parse(text, self.n)
    }

    pub fn arith(&self, a: &Scalar, b: &Scalar, op: ArithOp) -> Result<Scalar, ScalarError> {
        Ok(match op {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
            ArithOp::Div => a.checked_div(b)?,
        })
    }

    /// ∂/∂x_{i+1}, with `i` 0-based.
    pub fn partial(&self, a: &Scalar, i: usize) -> Result<Scalar, ScalarError> {
        if i >= self.n {
            return Err(ScalarError::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(a.derivative(i))
    }

    pub fn evaluate(&self, a: &Scalar, point: &[BigRational]) -> Result<BigRational, ScalarError> {
        if point.len() != self.n {
            return Err(ScalarError::PointDimension { got: point.len(), n: self.n });
        }
        if let Some(v) = a.max_var() {
            if v >= self.n {
                return Err(ScalarError::IndexOutOfRange { index: v, n: self.n });
            }
        }
        let mut full = point.to_vec();
        full.resize(MAX_VARS, BigRational::zero());
        let den = a.den.evaluate(&full);
        if den.is_zero() {
            return Err(ScalarError::PoleAtPoint);
        }
        Ok(a.num.evaluate(&full) / den)
    }

    /// Reproducible random polynomial of total degree ≤ `d`.
    pub fn random_polynomial(&self, d: u32, seed: u64) -> Scalar {
        random_polynomial(self.n, d, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Polynomial with small nonzero rational coefficients on a random subset
/// of the monomials of degree ≤ `d`; never zero.
pub fn random_polynomial<R: Rng>(n: usize, d: u32, rng: &mut R) -> Scalar {
    let monos = monomials_up_to(n, d);
    let mut terms = Vec::new();
    for m in &monos {
        if rng.gen_ratio(2, 3) {
            terms.push((*m, random_coefficient(rng)));
        }
    }
    if terms.is_empty() {
        terms.push((monos[monos.len() - 1], random_coefficient(rng)));
    }
    Scalar::from_poly(Poly::from_terms(terms))
}

fn random_coefficient<R: Rng>(rng: &mut R) -> BigRational {
    let mut num: i64 = rng.gen_range(1..=5);
    if rng.gen_bool(0.5) {
        num = -num;
    }
    let den: i64 = rng.gen_range(1..=3);
    BigRational::new(num.into(), den.into())
}
