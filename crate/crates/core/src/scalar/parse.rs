//! Recursive-descent parser for the scalar text syntax.
//!
//! expr := term (('+' | '-') term)*
//! term := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' '-'? integer)?
//! atom := integer | 'x' index | '(' expr ')'

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Poly, Scalar, ScalarError};

pub(super) fn parse(text: &str, n: usize) -> Result<Scalar, ScalarError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, n };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ScalarError {
        ScalarError::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' { acc * rhs } else { acc.checked_div(&rhs)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Scalar, ScalarError> {
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

    fn power(&mut self) -> Result<Scalar, ScalarError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error("expected integer exponent"));
        }
        let e: i32 = digits.parse().map_err(|_| self.error("exponent too large"))?;
        base.pow(if negative { -e } else { e })
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.digits();
                let v: BigInt = digits.parse().map_err(|_| self.error("bad integer"))?;
                Ok(Scalar::from_rational(BigRational::from_integer(v)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                let index = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && !d.starts_with('0'))
                    .and_then(|d| d.parse::<usize>().ok());
                match index {
                    Some(i) if i >= 1 && i <= self.n => Ok(Scalar::from_poly(Poly::var(i - 1))),
                    _ => Err(ScalarError::UnknownVariable(name)),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_variables() {
        for bad in ["x0", "x3", "y", "x01", "x1 + z"] {
            assert!(
                matches!(parse(bad, 2), Err(ScalarError::UnknownVariable(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "1 +", "(x1", "x1 ^", "2 $ 3", "x1 x2"] {
            assert!(parse(bad, 2).is_err(), "{bad}");
        }
    }

    #[test]
    fn precedence_and_negative_exponents() {
        let a = parse("2*x1^2*x2 - 1/3", 2).unwrap();
        let b = parse("-(1/3) + x2*(2*x1^2)", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse("x1^-2", 1).unwrap(), parse("1/(x1*x1)", 1).unwrap());
        assert_eq!(parse("-x1^2", 1).unwrap(), parse("-(x1^2)", 1).unwrap());
    }
}
