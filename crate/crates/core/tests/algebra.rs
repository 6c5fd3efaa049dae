use gwsym::algebra::{expand_at_infinity, parse::parse_rho, rat, MaxPlus, Poly, Rational, RhoRational, Ring};
use proptest::prelude::*;

fn small_poly(max_deg: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((0..=max_deg, -6i64..=6), 0..4)
        .prop_map(|ts| Poly::from_terms(ts.into_iter().map(|(e, c)| (e, Rational::from_integer(c.into())))))
}

fn rho_rational() -> impl Strategy<Value = RhoRational> {
    (small_poly(4), small_poly(2), -2i64..=2, 1i64..=5).prop_map(|(num, den, shift, scale)| {
        let den = if den.is_zero() { Poly::one() } else { den };
        let base = RhoRational::from_parts(num, den).expect("nonzero denominator");
        &base * &RhoRational::monomial(rat(1, scale), 10 * shift)
    })
}

fn nonzero() -> impl Strategy<Value = RhoRational> {
    rho_rational().prop_filter("nonzero", |x| !x.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in rho_rational(), b in rho_rational(), c in rho_rational()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &RhoRational::one(), a.clone());
    }

    #[test]
    fn inverse(a in nonzero()) {
        let inv = a.inv().unwrap();
        prop_assert!((&a * &inv).is_one());
        prop_assert_eq!(a.infinity_degree().unwrap(), -inv.infinity_degree().unwrap());
    }

    #[test]
    fn display_and_machine_forms_parse_back(a in rho_rational()) {
        prop_assert_eq!(parse_rho(&a.to_string()).unwrap(), a.clone());
        prop_assert_eq!(parse_rho(&a.to_machine_string()).unwrap(), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in rho_rational(), b in rho_rational(), x in 7i64..40) {
        let x = rat(x, 3);
        let (Ok(va), Ok(vb)) = (a.eval_rational(&x), b.eval_rational(&x)) else { return Ok(()) };
        prop_assert_eq!((&a * &b).eval_rational(&x).unwrap(), &va * &vb);
        prop_assert_eq!((&a + &b).eval_rational(&x).unwrap(), &va + &vb);
    }

    #[test]
    fn degrees_follow_max_plus(a in nonzero(), b in nonzero()) {
        let da = MaxPlus(a.infinity_degree());
        let db = MaxPlus(b.infinity_degree());
        prop_assert_eq!(MaxPlus((&a * &b).infinity_degree()), da.mul_ref(&db));
        let sum = MaxPlus((&a + &b).infinity_degree());
        prop_assert!(sum.0 <= da.add_ref(&db).0);
    }

    #[test]
    fn laurent_leading_term(a in nonzero()) {
        let t = expand_at_infinity(&a, 4).unwrap();
        let (e, c) = t.leading().unwrap().clone();
        prop_assert_eq!(Some(e), a.infinity_degree());
        prop_assert_eq!(c, a.leading_coefficient());
        if a.is_polynomial() || a.denom().is_monomial() {
            prop_assert!(t.is_exact());
            prop_assert_eq!(t.resum(), a);
        }
    }
}

#[test]
fn division_by_zero_is_an_error() {
    assert!(RhoRational::zero().inv().is_err());
    assert!(RhoRational::one().checked_div(&RhoRational::zero()).is_err());
    assert!(parse_rho("1/(rho - rho)").is_err());
}
