use gwsym::algebra::{int, rat, RhoRational};
use gwsym::gauge::{
    conservation_residual, constraint_space_dim, harmonic_gauge_residual, light_like_from_params, ConstraintKind,
};
use gwsym::null_geometry::{
    backtrace_sources, causally_unrelated, solve_null_scale, standard_config, tilde_zetas, FlatPoint, NullConfig,
};
use gwsym::tensor::{norm_sq, pairing, sandwich, CoVec4, Metric4, Sym2T};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = RhoRational> {
    (-5i64..=5, 1i64..=4, -2i64..=2).prop_map(|(n, d, e)| RhoRational::monomial(rat(n, d), 10 * e))
}

fn covector() -> impl Strategy<Value = CoVec4> {
    prop::array::uniform4(scalar()).prop_map(CoVec4::new)
}

fn light_like() -> impl Strategy<Value = CoVec4> {
    (prop::array::uniform4(-4i64..=4), any::<bool>(), 1i64..=5, -2i64..=2)
        .prop_filter("nonzero parameters", |(p, ..)| *p != [0; 4])
        .prop_map(|(p, future, d, e)| {
            light_like_from_params(
                p[0],
                p[1],
                p[2],
                p[3],
                future,
                &RhoRational::monomial(rat(1, d), 10 * e),
            )
        })
}

fn point() -> impl Strategy<Value = FlatPoint> {
    prop::array::uniform4(-9i64..=9).prop_map(FlatPoint::from_ints)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pairing_is_symmetric_and_bilinear(a in covector(), b in covector(), c in covector(), s in scalar()) {
        let h = Metric4::minkowski();
        prop_assert_eq!(pairing(&h, &a, &b), pairing(&h, &b, &a));
        prop_assert_eq!(pairing(&h, &(&a + &b), &c), pairing(&h, &a, &c) + pairing(&h, &b, &c));
        prop_assert_eq!(pairing(&h, &a.scale(&s), &b), &s * &pairing(&h, &a, &b));
    }

    #[test]
    fn sandwich_of_outer_square(z in covector(), xi in covector()) {
        let h = Metric4::minkowski();
        let p = pairing(&h, &z, &xi);
        prop_assert_eq!(sandwich(&h, &Sym2T::outer_square(&z), &xi), &p * &p);
    }

    #[test]
    fn parametrized_covectors_are_null(z in light_like()) {
        prop_assert!(norm_sq(&Metric4::minkowski(), &z).is_zero());
    }

    #[test]
    fn rank_one_polarizations_satisfy_both_constraints(z in light_like()) {
        let h = Metric4::minkowski();
        let a = Sym2T::outer_square(&z);
        prop_assert!(harmonic_gauge_residual(&h, &z, &a).is_zero());
        prop_assert!(conservation_residual(&h, &z, &a).is_zero());
        for kind in [ConstraintKind::HarmonicGauge, ConstraintKind::ConservationLaw] {
            let d = constraint_space_dim(kind, &h, &z);
            prop_assert_eq!(d.dim, 6);
            prop_assert!(!d.degenerate);
        }
    }

    #[test]
    fn null_scale_solve_gives_a_null_sum(a1 in scalar(), a2 in scalar(), a4 in scalar()) {
        let t = tilde_zetas();
        let Ok(a3) = solve_null_scale(&a1, &a2, &a4, &t) else { return Ok(()) };
        let sum = &(&(&t[0].scale(&a1) + &t[1].scale(&a2)) + &t[2].scale(&a3)) + &t[3].scale(&a4);
        prop_assert!(norm_sq(&Metric4::minkowski(), &sum).is_zero());
    }

    #[test]
    fn causal_relation_is_symmetric(p in point(), q in point()) {
        prop_assert_eq!(causally_unrelated(&p, &q), causally_unrelated(&q, &p));
        prop_assert!(!causally_unrelated(&p, &p));
    }

    #[test]
    fn equal_time_backtrace_is_unrelated(t in 1i64..=6, q in point()) {
        let times = [int(t), int(t), int(t), int(t)];
        let b = backtrace_sources(&q, &standard_config(), &int(2), &times);
        prop_assert!(b.all_unrelated());
        prop_assert!(b.tangents_independent);
    }
}

#[test]
fn non_null_configuration_is_rejected() {
    let mut z = standard_config().zetas().clone();
    z[0] = CoVec4::from_ints([1, 1, 1, 0]);
    assert!(NullConfig::new(Metric4::minkowski(), z).is_err());
}

#[test]
fn zero_covector_is_degenerate() {
    let d = constraint_space_dim(ConstraintKind::HarmonicGauge, &Metric4::minkowski(), &CoVec4::zero());
    assert!(d.degenerate);
}
