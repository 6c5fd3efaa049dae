use super::rational::{int, Rational};

use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse univariate polynomial in ρ over Q.
///
/// Terms are kept sorted by ascending exponent with no zero coefficients, so
/// derived equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(u32, Rational)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Rational, exp: u32) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(exp, c)] }
        }
    }

    pub fn rho() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, Rational)>>(it: I) -> Self {
        let mut acc: BTreeMap<u32, Rational> = BTreeMap::new();
        for (e, c) in it {
            *acc.entry(e).or_insert_with(Rational::zero) += c;
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn terms(&self) -> &[(u32, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.last().map(|t| t.0)
    }

    pub fn low_degree(&self) -> Option<u32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn leading_coeff(&self) -> Rational {
        self.terms.last().map(|t| t.1.clone()).unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, exp: u32) -> Rational {
        match self.terms.binary_search_by_key(&exp, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect(),
        }
    }

    pub fn shift(&self, by: u32) -> Self {
        Poly {
            terms: self.terms.iter().map(|(e, a)| (e + by, a.clone())).collect(),
        }
    }

    /// Divides by ρ^by; every exponent must be at least `by`.
    pub fn unshift(&self, by: u32) -> Self {
        Poly {
            terms: self.terms.iter().map(|(e, a)| (e - by, a.clone())).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn neg(&self) -> Self {
        Poly {
            terms: self.terms.iter().map(|(e, a)| (*e, -a)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.terms.len() == 1 {
            let (e, c) = &other.terms[0];
            return Poly {
                terms: self.terms.iter().map(|(f, a)| (f + e, a * c)).collect(),
            };
        }
        if self.terms.len() == 1 {
            return other.mul(self);
        }
        let mut acc: BTreeMap<u32, Rational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                *acc.entry(e1 + e2).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        Poly {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("polynomial division by zero");
        let lc = d.leading_coeff();
        let mut rem: BTreeMap<u32, Rational> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((&top, _)) = rem.iter().next_back() {
            if top < dd {
                break;
            }
            let c = rem.remove(&top).unwrap() / &lc;
            let shift = top - dd;
            for (e, a) in &d.terms[..d.terms.len() - 1] {
                let slot = rem.entry(e + shift).or_insert_with(Rational::zero);
                *slot -= &c * a;
                if slot.is_zero() {
                    rem.remove(&(e + shift));
                }
            }
            quot.push((shift, c));
        }
        quot.reverse();
        (
            Poly { terms: quot },
            Poly {
                terms: rem.into_iter().collect(),
            },
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lc = self.leading_coeff();
        self.scale(&(Rational::one() / lc))
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        let low = a.low_degree().unwrap().min(b.low_degree().unwrap());
        let mut x = a.unshift(a.low_degree().unwrap());
        let mut y = b.unshift(b.low_degree().unwrap());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x.monic().shift(low)
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut prev = 0u32;
        let mut power = Rational::one();
        for (e, c) in &self.terms {
            for _ in prev..*e {
                power *= x;
            }
            prev = *e;
            acc += c * &power;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| super::rational::to_f64(c) * x.powi(*e as i32))
            .sum()
    }
}

impl super::ring::Ring for Poly {
    fn zero() -> Self {
        Poly::zero()
    }
    fn one() -> Self {
        Poly::one()
    }
    fn from_rational(q: &Rational) -> Self {
        Poly::constant(q.clone())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
}

pub(crate) fn fmt_coeff_term(c: &Rational, exp: i64, first: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let negative = c < &Rational::zero();
    let mag = if negative { -c } else { c.clone() };
    if first {
        if negative {
            write!(f, "-")?;
        }
    } else if negative {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    match exp {
        0 => write!(f, "{}", mag),
        _ => {
            if !mag.is_one() {
                write!(f, "{}*", mag)?;
            }
            if exp == 1 {
                write!(f, "rho")
            } else {
                write!(f, "rho^{}", exp)
            }
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            fmt_coeff_term(c, *e as i64, i == 0, f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

pub fn poly_from_ints(coeffs: &[(u32, i64)]) -> Poly {
    Poly::from_terms(coeffs.iter().map(|(e, c)| (*e, int(*c))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn long_division_matches_hand_result() {
        let n = poly_from_ints(&[(30, 1), (20, -1)]);
        let d = poly_from_ints(&[(20, 1)]);
        let (q, r) = n.div_rem(&d);
        assert_eq!(q, poly_from_ints(&[(10, 1), (0, -1)]));
        assert!(r.is_zero());
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let f = poly_from_ints(&[(10, 1), (0, -1)]);
        let a = f.mul(&poly_from_ints(&[(10, 2), (0, 3)]));
        let b = f.mul(&poly_from_ints(&[(1, 1)])).scale(&rat(7, 2));
        assert_eq!(Poly::gcd(&a, &b), f);
    }

    #[test]
    fn display_is_descending() {
        let p = Poly::from_terms(vec![(0, int(-2)), (10, int(2)), (20, rat(-3, 8))]);
        assert_eq!(p.to_string(), "-3/8*rho^20 + 2*rho^10 - 2");
    }

    #[test]
    fn evaluation_agrees() {
        let p = poly_from_ints(&[(3, 2), (1, -1), (0, 5)]);
        assert_eq!(p.eval_rational(&int(2)), int(19));
        assert!((p.eval_f64(2.0) - 19.0).abs() < 1e-12);
    }
}
