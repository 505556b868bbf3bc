//! Scalar expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' int)?
//! atom   := int | 'sqrt17' | 'b(' int ')' | 'sqrt(' expr ')' | '(' expr ')' | '-' atom
//! ```
//!
//! A rational literal `p/q` is read as a division, which agrees with the
//! literal reading everywhere except directly before `^`; the serializer
//! never emits that shape. Whitespace is ignored.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::ext::ExtScalar;
use super::tower::TowerScalar;
use super::ScalarError;

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
}

impl<'s> Parser<'s> {
    fn err(&self, msg: impl Into<String>) -> ScalarError {
        ScalarError::Syntax { pos: self.pos, msg: msg.into() }
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

    fn eat(&mut self, lit: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ScalarError> {
        if self.eat(lit) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", lit)))
        }
    }

    fn int(&mut self, signed: bool) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        if signed && self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.err("expected integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn small_int(&mut self, signed: bool) -> Result<i64, ScalarError> {
        let at = self.pos;
        let n = self.int(signed)?;
        i64::try_from(n).map_err(|_| ScalarError::Syntax { pos: at, msg: "integer too large".into() })
    }

    fn expr(&mut self) -> Result<ExtScalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = &acc + &self.term()?;
            } else if self.peek() == Some(b'-') {
                self.pos += 1;
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ExtScalar, ScalarError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat("*") {
                acc = &acc * &self.factor()?;
            } else if self.peek() == Some(b'/') {
                self.pos += 1;
                let at = self.pos;
                let rhs = self.factor()?;
                acc = acc.checked_div(&rhs).map_err(|e| match e {
                    ScalarError::DivisionByZero => ScalarError::Syntax { pos: at, msg: "division by zero".into() },
                    other => other,
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<ExtScalar, ScalarError> {
        let base = self.atom()?;
        if self.eat("^") {
            let e = self.small_int(true)?;
            let e = i32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return base.pow(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExtScalar, ScalarError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(")")?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.int(false)?;
                Ok(ExtScalar::from(TowerScalar::from_rational(BigRational::from_integer(n))))
            }
            _ => {
                if self.eat("sqrt17") {
                    Ok(ExtScalar::from(TowerScalar::sqrt17()))
                } else if self.eat("sqrt(") {
                    let at = self.pos;
                    let v = self.expr()?;
                    self.expect(")")?;
                    v.sqrt().map_err(|e| match e {
                        ScalarError::NonPositiveRadicand(r) => ScalarError::NegativeRadicandAt { pos: at, radicand: r },
                        other => other,
                    })
                } else if self.eat("b(") {
                    let at = self.pos;
                    let n = self.small_int(true)?;
                    self.expect(")")?;
                    let b = TowerScalar::beta(n).map_err(|_| ScalarError::Syntax {
                        pos: at,
                        msg: format!("b({}) needs d - {} > 0", n, n),
                    })?;
                    Ok(ExtScalar::from(b))
                } else {
                    Err(self.err("expected a number, sqrt17, b(n), sqrt(...), '(' or '-'"))
                }
            }
        }
    }
}

/// Parses an expression that may contain fourth roots such as `sqrt(b(1))`.
pub fn parse_ext(expr: &str) -> Result<ExtScalar, ScalarError> {
    let mut p = Parser { src: expr.as_bytes(), pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

/// Parses an expression whose value lies in the tower.
pub fn parse_scalar(expr: &str) -> Result<TowerScalar, ScalarError> {
    parse_ext(expr)?.into_tower()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::qsqrt17::QSqrt17;
    use crate::scalars::rational::rat;
    use num_traits::One;

    #[test]
    fn beta_squared_collapses() {
        let v = parse_scalar("b(1)^2").unwrap();
        assert_eq!(v, TowerScalar::from_q(QSqrt17::new(rat(5, 2), rat(1, 2))));
    }

    #[test]
    fn perfect_square_collapses() {
        assert_eq!(parse_scalar("sqrt(4)").unwrap(), TowerScalar::from_int(2));
    }

    #[test]
    fn beta_product_is_one_radical() {
        let v = parse_scalar("b(0)*b(2)").unwrap();
        let expect = TowerScalar::sqrt_q(&QSqrt17::new(rat(19, 2), rat(5, 2))).unwrap();
        assert_eq!(v, expect);
        assert_eq!(v.terms().len(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_scalar("1 + * 2") {
            Err(ScalarError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{:?}", other),
        }
        assert!(matches!(parse_scalar("sqrt(1-sqrt17)"), Err(ScalarError::NegativeRadicandAt { .. })));
        assert!(matches!(parse_scalar("1/(b(1)^2-5/2-1/2*sqrt17)"), Err(ScalarError::Syntax { .. })));
        assert!(matches!(parse_scalar("b(6)"), Err(ScalarError::Syntax { .. })));
    }

    #[test]
    fn fourth_roots_need_parse_ext() {
        assert!(parse_scalar("sqrt(b(1))").is_err());
        let r = parse_ext("sqrt(b(1))").unwrap();
        assert_eq!(&r * &r, ExtScalar::from(TowerScalar::beta(1).unwrap()));
        assert_eq!(parse_ext("sqrt(b(1))^4").unwrap(), parse_ext("b(1)^2").unwrap());
        assert_eq!(parse_ext("1/sqrt(b(1))*sqrt(b(1))").unwrap(), ExtScalar::one());
    }
}
