//! Sparse multivariate polynomials over ℚ with graded-lex term order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Hard limit on the number of base coordinates.
pub const MAX_VARS: usize = 8;

/// Exponent vector. Ordered graded-lexicographically with x1 > x2 > ….
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub(crate) [u16; MAX_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; MAX_VARS]);

    pub fn var(i: usize) -> Monomial {
        let mut e = [0; MAX_VARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: &[u16]) -> Monomial {
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Monomial(e)
    }

    pub fn exponent(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn exponents(&self) -> &[u16; MAX_VARS] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; MAX_VARS]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Monomial(e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            if *a < *b {
                return None;
            }
            *a -= *b;
        }
        Some(Monomial(e))
    }

    /// Highest variable index with a positive exponent.
    pub fn max_var(&self) -> Option<usize> {
        (0..MAX_VARS).rev().find(|&i| self.0[i] > 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials in `n` variables of total degree ≤ `d`, ascending.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut layer = Vec::new();
        let mut exps = vec![0u16; n];
        compositions(n, deg, 0, &mut exps, &mut layer);
        layer.sort();
        out.extend(layer);
    }
    out
}

fn compositions(n: usize, left: u32, at: usize, exps: &mut Vec<u16>, out: &mut Vec<Monomial>) {
    if at == n {
        if left == 0 {
            out.push(Monomial::from_exponents(exps));
        }
        return;
    }
    for e in 0..=left {
        exps[at] = e as u16;
        compositions(n, left - e, at + 1, exps, out);
    }
    exps[at] = 0;
}

/// Terms sorted by strictly decreasing monomial; no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Monomial, BigRational)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::ONE, c)] }
        }
    }

    pub fn var(i: usize) -> Poly {
        Poly::term(Monomial::var(i), BigRational::one())
    }

    pub fn term(m: Monomial, c: BigRational) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds from arbitrary terms, combining duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Poly {
        let mut acc: HashMap<Monomial, BigRational> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
        Poly::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, BigRational>) -> Poly {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    /// Constant value, if constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, BigRational)> {
        self.terms.first()
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().filter_map(|(m, _)| m.max_var()).max()
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(a, b)| (a.mul(m), b * c)).collect(),
        }
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        Poly { terms: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        if other.is_zero() {
            return self.clone();
        }
        self.merge(other, true)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_term(m, c);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_term(m, c);
        }
        let mut acc: HashMap<Monomial, BigRational> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let prod = ca * cb;
                match acc.get_mut(&ma.mul(mb)) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(ma.mul(mb), prod);
                    }
                }
            }
        }
        Poly::from_map(acc)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut dm = *m;
            dm.0[var] -= 1;
            terms.push((dm, c * BigRational::from_integer(BigInt::from(e))));
        }
        // Differentiation can reorder terms.
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    v *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            total += v;
        }
        total
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let (lm, lc) = d.terms[0].clone();
        let lc_inv = lc.recip();
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.terms.first().cloned() {
            let qm = m.checked_div(&lm)?;
            let qc = c * &lc_inv;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        Some(Poly { terms: quot })
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.0[var]).max().unwrap_or(0)
    }

    /// Coefficient of `x_var^d`, a polynomial free of `x_var`.
    pub fn coeff_in(&self, var: usize, d: u16) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[var] == d)
            .map(|(m, c)| {
                let mut m = *m;
                m.0[var] = 0;
                (m, c.clone())
            })
            .collect::<Vec<_>>();
        // Removing one exponent preserves relative order only within the same power.
        let mut p = Poly { terms };
        p.terms.sort_by(|a, b| b.0.cmp(&a.0));
        p
    }

    fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let d = self.degree_in(var);
        (0..=d).map(|k| self.coeff_in(var, k)).collect()
    }

    fn shift_var(&self, var: usize, k: u16) -> Poly {
        let mut m = Monomial::ONE;
        m.0[var] = k;
        self.mul_term(&m, &BigRational::one())
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self == other {
            return self.monic();
        }
        let v = match (self.max_var(), other.max_var()) {
            (Some(a), Some(b)) => a.max(b),
            _ => return Poly::one(),
        };
        if self.degree_in(v) == 0 {
            return self.gcd(&other.content_in(v));
        }
        if other.degree_in(v) == 0 {
            return self.content_in(v).gcd(other);
        }
        let ca = self.content_in(v);
        let cb = other.content_in(v);
        let pa = self.div_exact(&ca).expect("content divides");
        let pb = other.div_exact(&cb).expect("content divides");
        let c = ca.gcd(&cb);
        let g = prs_gcd(pa, pb, v);
        c.mul(&g).monic()
    }

    /// Gcd of the coefficients with respect to `x_var`.
    fn content_in(&self, var: usize) -> Poly {
        let mut g = Poly::zero();
        for c in self.coeffs_in(var) {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_in(&self, var: usize) -> Poly {
        let c = self.content_in(var);
        self.div_exact(&c).expect("content divides")
    }

    fn prem(&self, g: &Poly, var: usize) -> Poly {
        let dg = g.degree_in(var);
        let lg = g.coeff_in(var, dg);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= dg {
            let dr = r.degree_in(var);
            let lr = r.coeff_in(var, dr);
            r = lg.mul(&r).sub(&lr.mul(&g.shift_var(var, dr - dg)));
            r = r.monic();
        }
        r
    }
}

/// Primitive pseudo-remainder sequence gcd of two polynomials primitive in `var`.
fn prs_gcd(mut f: Poly, mut g: Poly, var: usize) -> Poly {
    if f.degree_in(var) < g.degree_in(var) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = f.prem(&g, var);
        if r.is_zero() {
            return g.primitive_in(var).monic();
        }
        if r.degree_in(var) == 0 {
            return Poly::one();
        }
        f = g;
        g = r.primitive_in(var);
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            if !mag.is_one() || m.is_one() {
                factors.push(None);
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    factors.push(Some((i, e)));
                }
            }
            for (k, fac) in factors.iter().enumerate() {
                if k > 0 {
                    write!(f, "*")?;
                }
                match fac {
                    None => write_rational(f, &mag)?,
                    Some((i, 1)) => write!(f, "x{}", i + 1)?,
                    Some((i, e)) => write!(f, "x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
