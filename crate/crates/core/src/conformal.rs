//! Conformal weights: exact homogeneity of the coefficient forms under
//! h ↦ λ²h, and the weight bookkeeping that composes them.

use crate::algebra::{int, rat, Rational, RhoRational};
use crate::interaction::{EvalError, Evaluator, TermAst};
use crate::null_geometry::NullConfig;
use crate::ricci::{family, power_of, scaling_exponent, FormError, FormKey, FormalTensorPoly};
use crate::tensor::{norm_sq, CoVec4, Metric4, Sym2T};
use std::fmt;
use std::ops::Add;
use thiserror::Error;

/// Exponent w of a factor λ^w, λ = e^γ at the interaction point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight(pub i64);

impl Add for Weight {
    type Output = Weight;
    fn add(self, o: Weight) -> Weight {
        Weight(self.0 + o.0)
    }
}

impl std::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(it: I) -> Weight {
        it.fold(Weight(0), Add::add)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConformalError {
    #[error("{target} is not homogeneous under h -> λ²h; monomials with deviating metric count: {monomials:?}")]
    Inhomogeneous { target: String, monomials: Vec<String> },
    #[error("{target}: exponent fits disagree between λ samples ({first} vs {second})")]
    UnstableFit { target: String, first: i64, second: i64 },
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A form of the family or the k = 1 wave part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScalingTarget {
    Form(FormKey),
    WavePart,
}

impl ScalingTarget {
    fn form(self) -> &'static FormalTensorPoly {
        match self {
            ScalingTarget::Form(k) => family().get(k),
            ScalingTarget::WavePart => &family().wave_part,
        }
    }
}

impl fmt::Display for ScalingTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalingTarget::Form(k) => write!(f, "{k}"),
            ScalingTarget::WavePart => write!(f, "wave part"),
        }
    }
}

pub const SCALING_TARGETS: [ScalingTarget; 7] = [
    ScalingTarget::Form(FormKey::p(2)),
    ScalingTarget::Form(FormKey::p(3)),
    ScalingTarget::Form(FormKey::p(4)),
    ScalingTarget::Form(FormKey::h(2)),
    ScalingTarget::Form(FormKey::h(3)),
    ScalingTarget::Form(FormKey::h(4)),
    ScalingTarget::WavePart,
];

/// Generic slot data: full symmetric matrices and non-null covectors.
fn sample_slots(n: usize) -> Vec<(Sym2T, CoVec4)> {
    (0..n as i64)
        .map(|s| {
            let m = Sym2T::from_ints([
                [2 + s, 1, -1, s],
                [1, 3, s + 1, 2],
                [-1, s + 1, 1 - s, 1],
                [s, 2, 1, 4 + s],
            ])
            .expect("symmetric");
            (m, CoVec4::from_ints([3 + s, 1 - s, 2, -1 - s]))
        })
        .collect()
}

fn inhomogeneous(target: ScalingTarget, form: &FormalTensorPoly) -> ConformalError {
    let counts: Vec<usize> = form.monomials.iter().map(|m| m.skeleton.link_count()).collect();
    let majority = counts
        .iter()
        .copied()
        .max_by_key(|c| counts.iter().filter(|d| *d == c).count())
        .unwrap_or(0);
    let lines = form.machine_lines();
    let monomials = counts
        .iter()
        .zip(lines)
        .filter(|(c, _)| **c != majority)
        .map(|(_, l)| l)
        .collect();
    ConformalError::Inhomogeneous {
        target: target.to_string(),
        monomials,
    }
}

/// Exact exponent w with form(λ²h) = λ^w form(h), fitted at λ = 2 and λ = 3.
pub fn form_scaling_degree(target: ScalingTarget) -> Result<Weight, ConformalError> {
    let form = target.form();
    let slots = sample_slots(form.arity);
    let fit = |l: Rational| scaling_exponent(form, &slots, &l);
    let (Some(a), Some(b)) = (fit(int(2))?, fit(int(3))?) else {
        return Err(inhomogeneous(target, form));
    };
    if a != b {
        return Err(ConformalError::UnstableFit {
            target: target.to_string(),
            first: a,
            second: b,
        });
    }
    Ok(Weight(a))
}

/// Factors entering the weight of the four-fold interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FactorKind {
    WaveSymbol,
    Coefficient,
    QFlowoutSource,
    QFlowoutTarget,
}

impl FactorKind {
    pub fn rule_weight(self) -> Weight {
        match self {
            FactorKind::WaveSymbol => Weight(-1),
            FactorKind::Coefficient => Weight(-8),
            FactorKind::QFlowoutSource => Weight(3),
            FactorKind::QFlowoutTarget => Weight(-1),
        }
    }
}

/// Σ weights; a flowout target factor drops out when e^γ = 1 at the target.
pub fn compose_total_weight(chain: &[(FactorKind, Weight)], target_on_unit_set: bool) -> Weight {
    chain
        .iter()
        .filter(|(k, _)| !(target_on_unit_set && *k == FactorKind::QFlowoutTarget))
        .map(|(_, w)| *w)
        .sum()
}

/// Four waves, the ℋ coefficient and the Q transport.
pub fn canonical_chain() -> Vec<(FactorKind, Weight)> {
    let mut chain: Vec<(FactorKind, Weight)> = std::iter::repeat_n(FactorKind::WaveSymbol, 4)
        .map(|k| (k, k.rule_weight()))
        .collect();
    for k in [
        FactorKind::Coefficient,
        FactorKind::QFlowoutSource,
        FactorKind::QFlowoutTarget,
    ] {
        chain.push((k, k.rule_weight()));
    }
    chain
}

/// Weight of σ(Q) on the diagonal.
pub fn q_diag_weight() -> Weight {
    Weight(2)
}

/// Factor picked up by 1/|ξ|² under h ↦ λ²h.
pub fn q_diag_factor(xi: &CoVec4, lambda: &Rational) -> Option<Rational> {
    let h = Metric4::minkowski();
    let scaled = h.conformal(&RhoRational::constant(lambda.clone())).ok()?;
    let a = norm_sq(&h, xi).inv().ok()?;
    let b = norm_sq(&scaled, xi).inv().ok()?;
    (&b / &a).as_constant()
}

/// Exponent of that factor as a power of λ.
pub fn q_diag_weight_direct(xi: &CoVec4, lambda: &Rational) -> Option<i64> {
    power_of(&q_diag_factor(xi, lambda)?, lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scaling {
    Power(i64),
    /// Both sides vanish, so every power holds.
    Vanishing,
    NotAPower,
}

/// Exponent w with eval(term; λ²h, λ⁻¹·symbols) = λ^w·eval(term; h, symbols).
pub fn end_to_end_scaling(ast: &TermAst, config: &NullConfig, lambda: &Rational) -> Result<Scaling, ConformalError> {
    let base = Evaluator::new(config);
    let scaled_cfg = config
        .with_metric(
            config
                .metric()
                .conformal(&RhoRational::constant(lambda.clone()))
                .expect("λ is nonzero"),
        )
        .expect("null directions are conformally invariant");
    let inv = Rational::from_integer(1.into()) / lambda;
    let leaves = std::array::from_fn(|i| Sym2T::outer_square(config.zeta(i + 1)).scale_rational(&inv));
    let scaled = Evaluator::with_leaves(&scaled_cfg, leaves);
    let a = base.eval(ast)?;
    let b = scaled.eval(ast)?;
    let mut ratio: Option<RhoRational> = None;
    for i in 0..4 {
        for j in 0..4 {
            let (x, y) = (a.matrix.get(i, j), b.matrix.get(i, j));
            if x.is_zero() != y.is_zero() {
                return Ok(Scaling::NotAPower);
            }
            if x.is_zero() {
                continue;
            }
            let r = y / x;
            match &ratio {
                None => ratio = Some(r),
                Some(q) if *q == r => {}
                Some(_) => return Ok(Scaling::NotAPower),
            }
        }
    }
    let Some(r) = ratio else { return Ok(Scaling::Vanishing) };
    Ok(r.as_constant()
        .and_then(|r| power_of(&r, lambda))
        .map_or(Scaling::NotAPower, Scaling::Power))
}

/// Sample λ values used by the checks.
pub fn sample_lambdas() -> [Rational; 2] {
    [int(2), rat(3, 2)]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_rules() {
        assert_eq!(compose_total_weight(&canonical_chain(), true), Weight(-9));
        assert_eq!(compose_total_weight(&[], true), Weight(0));
        let q = [
            (FactorKind::QFlowoutSource, Weight(3)),
            (FactorKind::QFlowoutTarget, Weight(-1)),
        ];
        assert_eq!(compose_total_weight(&q, false), Weight(2));
        assert_eq!(q_diag_weight(), Weight(2));
    }

    #[test]
    fn q_diag_direct() {
        let xi = CoVec4::from_ints([2, 1, 0, 0]);
        assert_eq!(q_diag_weight_direct(&xi, &int(3)), Some(2));
        assert_eq!(q_diag_factor(&xi, &int(1)), Some(int(1)));
    }
}
