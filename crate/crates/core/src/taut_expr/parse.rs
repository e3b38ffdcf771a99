//! Recursive-descent parser for the ASCII expression syntax.
//!
//! ```text
//! expr     := term (("+"|"-") term)*
//! term     := ("-")? atom ("*" atom)*
//! atom     := rational | factor
//! factor   := gen ("^" posint)? | "(" expr ")" ("^" posint)?
//! gen      := "psi" posint | "kappa" posint | "b{" posint ("," posint)* "}"
//! rational := posint ("/" posint)?
//! ```
//!
//! Whitespace is ignored between tokens. Boundary subsets are canonicalized
//! on ingestion.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ExprError, ModuliContext, Monomial, Subset, TautPolynomial};
use crate::rational::Rational;

pub fn parse_expression(ctx: ModuliContext, text: &str) -> Result<TautPolynomial, ExprError> {
    let mut p = Parser { ctx, src: text.as_bytes(), pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    ctx: ModuliContext,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExprError {
        ExprError::Syntax { pos: self.pos, msg: msg.to_string() }
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

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a positive integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit string"))
    }

    fn small_int(&mut self) -> Result<u32, ExprError> {
        let start = self.pos;
        let v = self.integer()?;
        u32::try_from(v).map_err(|_| ExprError::Syntax { pos: start, msg: "integer too large".into() })
    }

    fn expr(&mut self) -> Result<TautPolynomial, ExprError> {
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

    fn term(&mut self) -> Result<TautPolynomial, ExprError> {
        let negate = self.eat(b'-');
        let mut acc = self.atom()?;
        while self.eat(b'*') {
            acc = &acc * &self.atom()?;
        }
        Ok(if negate { -&acc } else { acc })
    }

    fn atom(&mut self) -> Result<TautPolynomial, ExprError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let den = if self.eat(b'/') {
                    let at = self.pos;
                    let d = self.integer()?;
                    if d.is_zero() {
                        return Err(ExprError::Syntax { pos: at, msg: "zero denominator".into() });
                    }
                    d
                } else {
                    BigInt::one()
                };
                Ok(TautPolynomial::constant(self.ctx, Rational::new(num, den)))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                let e = self.exponent()?;
                Ok(inner.pow(e))
            }
            Some(_) => {
                let m = self.generator()?;
                let e = self.exponent()?;
                let factors = m.factors()[0];
                Ok(TautPolynomial::monomial(
                    self.ctx,
                    Monomial::power(factors.0, factors.1 * e),
                    Rational::one(),
                ))
            }
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn exponent(&mut self) -> Result<u32, ExprError> {
        if self.eat(b'^') {
            self.small_int()
        } else {
            Ok(1)
        }
    }

    fn generator(&mut self) -> Result<Monomial, ExprError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        if self.keyword("psi") {
            let i = self.small_int()?;
            return self.ctx.psi(i).map(Monomial::generator);
        }
        if self.keyword("kappa") {
            let a = self.small_int()?;
            return self.ctx.kappa(a).map(Monomial::generator);
        }
        if self.keyword("b{") {
            let mut points = vec![self.small_int()?];
            while self.eat(b',') {
                points.push(self.small_int()?);
            }
            self.expect(b'}')?;
            for &p in &points {
                if p == 0 || p > self.ctx.n() as u32 {
                    return Err(ExprError::IndexOutOfRange { index: p, n: self.ctx.n() });
                }
            }
            let subset = Subset::from_points(points.iter().copied());
            if subset.len() as usize != points.len() {
                return Err(ExprError::Syntax { pos: start, msg: "repeated point in boundary subset".into() });
            }
            return self.ctx.canonicalize_boundary(subset).map(Monomial::generator);
        }
        self.pos = start;
        Err(self.error("expected psi<i>, kappa<a>, b{...}, a number or '('"))
    }
}
