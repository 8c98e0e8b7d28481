//! Recursive-descent parser for rational expressions in `x`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' exponent)?
//! exponent := '-'? integer | '(' '-'? integer ')'
//! atom   := integer | 'x' | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. `^` binds tighter than unary minus, so `-x^2`
//! is `-(x^2)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::ratfun::RationalFunction;

const MAX_EXPONENT: i64 = 4096;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn parse(s: &str) -> Result<RationalFunction> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.peek().is_none() {
        return Err(p.err("empty expression"));
    }
    let r = p.expr()?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return Err(p.err(&format!("unexpected character '{}'", c as char)));
    }
    Ok(r)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
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

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.unary()?;
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                acc = (&acc / &rhs)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.eat(b'-') {
            return Ok(-&self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let e = if self.eat(b'(') {
            let e = self.signed_int()?;
            if !self.eat(b')') {
                return Err(self.err("expected ')'"));
            }
            e
        } else {
            self.signed_int()?
        };
        if e.abs() > MAX_EXPONENT {
            return Err(self.err("exponent too large"));
        }
        base.pow(e)
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            self.pos = start;
            return Err(self.err("expected integer exponent"));
        }
        let v: i64 = digits.parse().map_err(|_| Error::Syntax { pos: start, msg: "exponent too large".into() })?;
        Ok(if neg { -v } else { v })
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(RationalFunction::x())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits();
                let n: BigInt = d.parse().expect("digits");
                Ok(RationalFunction::constant(BigRational::from_integer(n)))
            }
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parse a rational number such as `3`, `-2/5` or a plain decimal `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if let Some((a, b)) = t.split_once('.') {
        let (neg, a) = match a.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, a),
        };
        let ok = |d: &str| d.bytes().all(|c| c.is_ascii_digit());
        if ok(a) && ok(b) && !(a.is_empty() && b.is_empty()) {
            let n: BigInt = format!("{a}{b}").trim_start_matches('0').parse().unwrap_or_default();
            let d = num_traits::pow(BigInt::from(10), b.len());
            let r = BigRational::new(n, d);
            return Ok(if neg { -r } else { r });
        }
    }
    let r = parse(t)?;
    if !r.is_constant() {
        return Err(Error::Syntax { pos: 0, msg: "expected a constant".into() });
    }
    Ok(r.leading_coefficient())
}

/// Parse a real number; accepts rationals and float literals such as `1e6`.
pub fn parse_real(s: &str) -> Result<f64> {
    if let Ok(v) = s.trim().parse::<f64>() {
        return Ok(v);
    }
    let r = parse_rational(s)?;
    Ok(r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;

    #[test]
    fn parses_examples() {
        let h = parse("x^2/(x+1)").unwrap();
        assert_eq!(h.num(), &Polynomial::from_ints(&[0, 0, 1]));
        assert_eq!(h.den(), &Polynomial::from_ints(&[1, 1]));
        assert_eq!(parse("1/0"), Err(Error::ZeroDenominator));
        assert_eq!(parse("-x^2"), parse("-(x^2)"));
        assert_eq!(parse("x^-2").unwrap(), parse("1/x^2").unwrap());
        assert_eq!(parse("x^(-1)").unwrap(), parse("1/x").unwrap());
        assert_eq!(parse(" 3 / 6 ").unwrap(), parse("1/2").unwrap());
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("x^^2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(x+1"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(parse("x y"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse("2*"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn display_roundtrip() {
        for s in ["x^2/(x+1)", "3*x^3 - x/7 + 2", "(x-1)/(2*x+3)^2", "-5", "1/(x^2+1)", "x^-3"] {
            let h = parse(s).unwrap();
            let printed = h.to_string();
            assert_eq!(parse(&printed).unwrap(), h, "{s} -> {printed}");
            assert_eq!(parse(&printed).unwrap().to_string(), printed);
        }
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_real("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_real("1e6").unwrap(), 1e6);
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert!(parse_rational("x").is_err());
    }
}
