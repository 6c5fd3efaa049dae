use super::poly::fmt_coeff_term;
use super::rational::Rational;
use super::rho::{AlgebraError, RhoRational};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Truncated expansion of a rational function at ρ = ∞.
///
/// `error_exponent` bounds every omitted exponent strictly from above; `None`
/// means the listed terms are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentTail {
    pub terms: Vec<(i64, Rational)>,
    pub error_exponent: Option<i64>,
}

impl LaurentTail {
    pub fn leading(&self) -> Option<&(i64, Rational)> {
        self.terms.first()
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms
            .iter()
            .find(|(e, _)| *e == exp)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn resum(&self) -> RhoRational {
        self.terms.iter().fold(RhoRational::zero(), |acc, (e, c)| {
            acc + RhoRational::monomial(c.clone(), *e)
        })
    }

    pub fn is_exact(&self) -> bool {
        self.error_exponent.is_none()
    }
}

impl fmt::Display for LaurentTail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            fmt_coeff_term(c, *e, i == 0, f)?;
        }
        if let Some(e) = self.error_exponent {
            write!(f, " + O(rho^{})", e - 1)?;
        }
        Ok(())
    }
}

/// First `n_terms` nonzero terms of the expansion of `a` at infinity.
pub fn expand_at_infinity(a: &RhoRational, n_terms: usize) -> Result<LaurentTail, AlgebraError> {
    if a.is_zero() {
        return Err(AlgebraError::ZeroExpansion);
    }
    let den = a.denom();
    let dd = den.degree().unwrap() as i64;
    let lc = den.leading_coeff();
    let den_terms: Vec<(i64, Rational)> = den.terms().iter().map(|(e, c)| (*e as i64, c.clone())).collect();
    let mut rem: BTreeMap<i64, Rational> = a.numer().terms().iter().map(|(e, c)| (*e as i64, c.clone())).collect();
    let mut terms = Vec::new();
    while terms.len() < n_terms {
        let Some((&top, _)) = rem.iter().next_back() else { break };
        let c = rem.remove(&top).unwrap() / &lc;
        let shift = top - dd;
        for (e, d) in &den_terms[..den_terms.len() - 1] {
            let slot = rem.entry(e + shift).or_insert_with(Rational::zero);
            *slot -= &c * d;
            if slot.is_zero() {
                rem.remove(&(e + shift));
            }
        }
        terms.push((shift, c));
    }
    let error_exponent = rem.keys().next_back().map(|top| top - dd + 1);
    Ok(LaurentTail { terms, error_exponent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn r(s: &str) -> RhoRational {
        s.parse().unwrap()
    }

    #[test]
    fn geometric_series() {
        let t = expand_at_infinity(&r("1/(2*rho^10 - 2)"), 2).unwrap();
        assert_eq!(t.terms, vec![(-10, rat(1, 2)), (-20, rat(1, 2))]);
        assert_eq!(t.error_exponent, Some(-29));
        assert_eq!(t.to_string(), "1/2*rho^-10 + 1/2*rho^-20 + O(rho^-30)");
    }

    #[test]
    fn polynomial_is_exact() {
        let t = expand_at_infinity(&r("rho^10 - 1"), 2).unwrap();
        assert_eq!(t.terms, vec![(10, rat(1, 1)), (0, rat(-1, 1))]);
        assert!(t.is_exact());
    }

    #[test]
    fn nested_fraction_leading_terms() {
        let a = r("(rho^10-1)^2*rho^20/((2*rho^10-2)*(-2))");
        let t = expand_at_infinity(&a, 2).unwrap();
        assert_eq!(t.terms, vec![(30, rat(-1, 4)), (20, rat(1, 4))]);
        assert!(t.error_exponent.is_none_or(|e| e <= 10));
    }

    #[test]
    fn zero_is_rejected() {
        assert_eq!(
            expand_at_infinity(&RhoRational::zero(), 3),
            Err(AlgebraError::ZeroExpansion)
        );
    }
}
