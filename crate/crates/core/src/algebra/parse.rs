//! Expression grammar for scalars in ρ:
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' integer)?
//! atom  := number | "rho" | '(' expr ')'
//! ```
//!
//! `number` is an integer or a finite decimal; `integer` may carry a sign.

use super::rational::parse_rational;
use super::rho::{AlgebraError, RhoRational};

pub fn parse_rho(input: &str) -> Result<RhoRational, AlgebraError> {
    let mut p = Parser {
        src: input,
        chars: input.char_indices().peekable(),
    };
    let v = p.expr()?;
    p.skip_ws();
    if let Some(&(i, _)) = p.chars.peek() {
        return Err(p.err(format!("unexpected trailing input at byte {}", i)));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: String) -> AlgebraError {
        AlgebraError::Parse {
            input: self.src.to_string(),
            reason,
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().map(|(_, c)| *c)
    }

    fn expr(&mut self) -> Result<RhoRational, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.chars.next();
                    acc = acc + self.term()?;
                }
                Some('-') => {
                    self.chars.next();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RhoRational, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.chars.next();
                    acc = acc * self.unary()?;
                }
                Some('/') => {
                    self.chars.next();
                    let d = self.unary()?;
                    acc = acc.checked_div(&d).map_err(|_| self.err("division by zero".into()))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RhoRational, AlgebraError> {
        match self.peek() {
            Some('-') => {
                self.chars.next();
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.chars.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RhoRational, AlgebraError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.chars.next();
            let exp = self.signed_integer()?;
            return base.pow(exp).map_err(|_| self.err("negative power of zero".into()));
        }
        Ok(base)
    }

    fn signed_integer(&mut self) -> Result<i64, AlgebraError> {
        let mut text = String::new();
        if let Some(c @ ('-' | '+')) = self.peek() {
            text.push(c);
            self.chars.next();
        }
        while let Some((_, c)) = self.chars.peek() {
            if c.is_ascii_digit() {
                text.push(*c);
                self.chars.next();
            } else {
                break;
            }
        }
        text.parse().map_err(|_| self.err(format!("bad exponent {:?}", text)))
    }

    fn atom(&mut self) -> Result<RhoRational, AlgebraError> {
        match self.peek() {
            Some('(') => {
                self.chars.next();
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("missing ')'".into()));
                }
                self.chars.next();
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut text = String::new();
                while let Some((_, c)) = self.chars.peek() {
                    if c.is_ascii_digit() || *c == '.' {
                        text.push(*c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                parse_rational(&text)
                    .map(RhoRational::constant)
                    .ok_or_else(|| self.err(format!("bad number {:?}", text)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let mut text = String::new();
                while let Some((_, c)) = self.chars.peek() {
                    if c.is_ascii_alphanumeric() || *c == '_' {
                        text.push(*c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                if text == "rho" {
                    Ok(RhoRational::rho_pow(1))
                } else {
                    Err(self.err(format!("unknown symbol {:?}", text)))
                }
            }
            Some(c) => Err(self.err(format!("unexpected character {:?}", c))),
            None => Err(self.err("unexpected end of input".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn precedence_and_signs() {
        let v = parse_rho("-3/8*rho^2 + 2*(rho - 1)").unwrap();
        let expect =
            RhoRational::monomial(rat(-3, 8), 2) + RhoRational::rho_pow(1).scale(&rat(2, 1)) - RhoRational::integer(2);
        assert_eq!(v, expect);
    }

    #[test]
    fn negative_exponents() {
        assert_eq!(parse_rho("1/2*rho^-10").unwrap(), RhoRational::monomial(rat(1, 2), -10));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rho("rho +").is_err());
        assert!(parse_rho("x^2").is_err());
        assert!(parse_rho("1/(rho-rho)").is_err());
        assert!(parse_rho("(rho").is_err());
    }
}
