use gwsym::algebra::rat;
use gwsym::conformal::*;
use gwsym::interaction::enumerate_all;
use gwsym::null_geometry::standard_config;
use gwsym::ricci::FormKey;

#[test]
fn degree_table() {
    let expected = [-4, -6, -8, -4, -6, -8, -2];
    for (t, w) in SCALING_TARGETS.iter().zip(expected) {
        assert_eq!(form_scaling_degree(*t).unwrap(), Weight(w), "{t}");
    }
}

#[test]
fn degrees_additive_through_nesting() {
    let cfg = standard_config();
    // Each form contributes its degree, each Q +2 and each wave -1.
    for t in enumerate_all().iter().step_by(41) {
        let mut predicted = -4 + 2 * t.ast.q_count() as i64;
        let mut stack = vec![&t.ast];
        while let Some(n) = stack.pop() {
            match n {
                gwsym::interaction::TermAst::Leaf(_) => {}
                gwsym::interaction::TermAst::Q(c) => stack.push(c),
                gwsym::interaction::TermAst::Form(k, cs) => {
                    predicted += form_scaling_degree(ScalingTarget::Form(*k)).unwrap().0;
                    stack.extend(cs);
                }
            }
        }
        assert_eq!(predicted, -12);
        for l in sample_lambdas() {
            let s = end_to_end_scaling(&t.ast, &cfg, &l).unwrap();
            assert!(s == Scaling::Power(predicted) || s == Scaling::Vanishing, "{}", t.ast);
        }
    }
}

#[test]
fn complete_term_scales_by_minus_twelve_then_nine() {
    let cfg = standard_config();
    let ast = "P2(1,Q(P2(2,Q(P2(3,4)))))".parse().unwrap();
    assert_eq!(end_to_end_scaling(&ast, &cfg, &rat(5, 2)).unwrap(), Scaling::Power(-12));
    let coefficient_and_waves = Weight(-12);
    let with_transport = coefficient_and_waves + FactorKind::QFlowoutSource.rule_weight();
    assert_eq!(with_transport, compose_total_weight(&canonical_chain(), true));
    assert_eq!(with_transport, Weight(-9));
    assert_eq!(
        form_scaling_degree(ScalingTarget::Form(FormKey::h(4))).unwrap(),
        Weight(-8)
    );
}
