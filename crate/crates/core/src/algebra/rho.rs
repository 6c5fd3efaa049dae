use super::poly::{fmt_coeff_term, Poly};
use super::rational::{int, Rational};

use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("cannot expand the zero rational function at infinity")]
    ZeroExpansion,
    #[error("malformed expression {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Element of Q(ρ): reduced fraction with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RhoRational {
    num: Poly,
    den: Poly,
}

impl RhoRational {
    pub fn zero() -> Self {
        RhoRational {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RhoRational {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(int(n))
    }

    /// c·ρ^exp for any integer exponent.
    pub fn monomial(c: Rational, exp: i64) -> Self {
        if exp >= 0 {
            RhoRational {
                num: Poly::monomial(c, exp as u32),
                den: Poly::one(),
            }
        } else {
            Self::from_parts(Poly::constant(c), Poly::monomial(Rational::one(), (-exp) as u32))
                .expect("monomial denominator is nonzero")
        }
    }

    pub fn rho_pow(exp: i64) -> Self {
        Self::monomial(Rational::one(), exp)
    }

    pub fn from_poly(p: Poly) -> Self {
        RhoRational {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_parts(num: Poly, den: Poly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let lc = den.leading_coeff();
        let (mut num, mut den) = if lc.is_one() {
            (num, den)
        } else {
            let inv = Rational::one() / lc;
            (num.scale(&inv), den.scale(&inv))
        };
        let strip = num.low_degree().unwrap().min(den.low_degree().unwrap());
        if strip > 0 {
            num = num.unshift(strip);
            den = den.unshift(strip);
        }
        if den.is_monomial() {
            return RhoRational { num, den };
        }
        let g = Poly::gcd(&num, &den);
        if g.is_one() {
            RhoRational { num, den }
        } else {
            let (n, _) = num.div_rem(&g);
            let (d, _) = den.div_rem(&g);
            RhoRational { num: n, den: d }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// deg(numerator) − deg(denominator); `None` stands for −∞ (the zero element).
    pub fn infinity_degree(&self) -> Option<i64> {
        self.num.degree().map(|d| d as i64 - self.den.degree().unwrap() as i64)
    }

    /// Coefficient of ρ^{infinity_degree} in the expansion at infinity.
    pub fn leading_coefficient(&self) -> Rational {
        if self.is_zero() {
            Rational::zero()
        } else {
            self.num.leading_coeff() / self.den.leading_coeff()
        }
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, n: i64) -> Result<Self, AlgebraError> {
        if n < 0 {
            return self.inv()?.pow(-n);
        }
        Ok(RhoRational {
            num: self.num.pow(n as u32),
            den: self.den.pow(n as u32),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RhoRational {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn eval_rational(&self, x: &Rational) -> Result<Rational, AlgebraError> {
        let d = self.den.eval_rational(x);
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.num.eval_rational(x) / d)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// Serialized `(P(rho))/(Q(rho))` form used in machine reports.
    pub fn to_machine_string(&self) -> String {
        format!("({})/({})", self.num, self.den)
    }

    fn add_impl(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::reduce(self.num.add(&other.num), self.den.clone());
        }
        if self.den.is_monomial() && other.den.is_monomial() {
            let (a, b) = (self.den.degree().unwrap(), other.den.degree().unwrap());
            let top = a.max(b);
            let num = self.num.shift(top - a).add(&other.num.shift(top - b));
            return Self::reduce(num, Poly::rho().pow(top));
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::reduce(num, self.den.mul(&other.den))
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return RhoRational {
                num: self.num.mul(&other.num),
                den: Poly::one(),
            };
        }
        Self::reduce(self.num.mul(&other.num), self.den.mul(&other.den))
    }
}

impl Default for RhoRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rational> for RhoRational {
    fn from(q: Rational) -> Self {
        Self::constant(q)
    }
}

impl From<i64> for RhoRational {
    fn from(n: i64) -> Self {
        Self::integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a RhoRational> for &'a RhoRational {
            type Output = RhoRational;
            fn $method(self, rhs: &'a RhoRational) -> RhoRational {
                let f: fn(&RhoRational, &RhoRational) -> RhoRational = $body;
                f(self, rhs)
            }
        }
        impl $tr<RhoRational> for RhoRational {
            type Output = RhoRational;
            fn $method(self, rhs: RhoRational) -> RhoRational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a RhoRational> for RhoRational {
            type Output = RhoRational;
            fn $method(self, rhs: &'a RhoRational) -> RhoRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.add_impl(b));
forward_binop!(Sub, sub, |a, b| a.add_impl(&-b));
forward_binop!(Mul, mul, |a, b| a.mul_impl(b));
forward_binop!(Div, div, |a, b| a
    .checked_div(b)
    .expect("division by the zero rational function"));

impl Neg for RhoRational {
    type Output = RhoRational;
    fn neg(self) -> RhoRational {
        RhoRational {
            num: self.num.neg(),
            den: self.den,
        }
    }
}

impl Neg for &RhoRational {
    type Output = RhoRational;
    fn neg(self) -> RhoRational {
        RhoRational {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl super::ring::Ring for RhoRational {
    fn zero() -> Self {
        RhoRational::zero()
    }
    fn one() -> Self {
        RhoRational::one()
    }
    fn from_rational(q: &Rational) -> Self {
        RhoRational::constant(q.clone())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add_impl(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul_impl(other)
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

/// Human-readable form: polynomials print bare, Laurent monomials use negative
/// exponents, anything else prints as a quotient.
impl fmt::Display for RhoRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.den.is_monomial() {
            let shift = self.den.degree().unwrap() as i64;
            for (i, (e, c)) in self.num.terms().iter().rev().enumerate() {
                fmt_coeff_term(c, *e as i64 - shift, i == 0, f)?;
            }
            return Ok(());
        }
        let wrap = |p: &Poly| {
            if p.terms().len() > 1 {
                format!("({})", p)
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RhoRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::str::FromStr for RhoRational {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::parse::parse_rho(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn r(s: &str) -> RhoRational {
        s.parse().unwrap()
    }

    #[test]
    fn like_terms_sum() {
        assert_eq!(r("rho^10") + r("rho^10"), r("2*rho^10"));
    }

    #[test]
    fn canonical_fraction() {
        let q = RhoRational::one().checked_div(&r("2*rho^10 - 2")).unwrap();
        assert_eq!(q.denom(), &r("rho^10 - 1").numer().clone());
        assert_eq!(q.numer(), &Poly::constant(rat(1, 2)));
    }

    #[test]
    fn hand_long_division() {
        assert_eq!(r("rho^30 - rho^20") / r("rho^20"), r("rho^10 - 1"));
    }

    #[test]
    fn degrees() {
        assert_eq!(r("rho^10").infinity_degree(), Some(10));
        assert_eq!(r("1/(2*rho^10 - 2)").infinity_degree(), Some(-10));
        assert_eq!(r("(rho^30 - rho^20)/(2*rho^10)").infinity_degree(), Some(20));
        assert_eq!(RhoRational::zero().infinity_degree(), None);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            RhoRational::one().checked_div(&RhoRational::zero()),
            Err(AlgebraError::DivisionByZero)
        );
    }

    #[test]
    fn machine_string_round_trips() {
        for s in [
            "1/(2*rho^10 - 2)",
            "-3/8*rho^30 + rho^-10",
            "0",
            "(rho^2+1)/(rho^3-rho)",
        ] {
            let x = r(s);
            let back: RhoRational = x.to_machine_string().parse().unwrap();
            assert_eq!(back, x);
            let shown: RhoRational = x.to_string().parse().unwrap();
            assert_eq!(shown, x);
        }
    }
}
