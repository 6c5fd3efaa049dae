//! Microlocal order bookkeeping: orders are affine in the source parameter μ
//! and change only through named rules, each application leaving a trace line.

use crate::algebra::{int, rat, Rational};
use crate::interaction::TermAst;
use crate::ricci::{family, FormKind};
use num_traits::{Signed, Zero};
use std::fmt;
use std::ops::{Add, Sub};
use thiserror::Error;

/// a·μ + b.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub mu: Rational,
    pub constant: Rational,
}

impl Affine {
    pub fn mu() -> Self {
        Affine {
            mu: int(1),
            constant: int(0),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Affine {
            mu: int(0),
            constant: c,
        }
    }

    pub fn mu_plus(c: Rational) -> Self {
        Affine {
            mu: int(1),
            constant: c,
        }
    }

    pub fn shift(&self, c: &Rational) -> Self {
        Affine {
            mu: self.mu.clone(),
            constant: &self.constant + c,
        }
    }

    pub fn at(&self, mu: &Rational) -> Rational {
        &self.mu * mu + &self.constant
    }
}

impl Add for &Affine {
    type Output = Affine;
    fn add(self, o: &Affine) -> Affine {
        Affine {
            mu: &self.mu + &o.mu,
            constant: &self.constant + &o.constant,
        }
    }
}

impl Sub for &Affine {
    type Output = Affine;
    fn sub(self, o: &Affine) -> Affine {
        Affine {
            mu: &self.mu - &o.mu,
            constant: &self.constant - &o.constant,
        }
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = int(1);
        let has_mu = !self.mu.is_zero();
        if has_mu {
            if self.mu == one {
                write!(f, "μ")?;
            } else if self.mu == -one.clone() {
                write!(f, "-μ")?;
            } else {
                write!(f, "{}μ", self.mu)?;
            }
        }
        if !self.constant.is_zero() || !has_mu {
            if has_mu {
                let sign = if self.constant.is_negative() { "-" } else { "+" };
                write!(f, " {sign} {}", self.constant.abs())?;
            } else {
                write!(f, "{}", self.constant)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Lagrangian {
    /// N*Y, conormal bundle of the source surface.
    ConormalSource,
    /// Λ_i, flowout of wave i (None when the wave is unspecified).
    Flowout(Option<u8>),
    /// Λ^ĝ_{q₀}, the light cone emanating from the interaction point.
    InteractionCone,
    /// N*{p₀} along a curve.
    PointConormal,
    /// The pair (N*Y, Λ).
    Paired,
}

impl fmt::Display for Lagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lagrangian::ConormalSource => write!(f, "N*Y"),
            Lagrangian::Flowout(Some(i)) => write!(f, "Λ_{i}"),
            Lagrangian::Flowout(None) => write!(f, "Λ"),
            Lagrangian::InteractionCone => write!(f, "Λ^g_q0"),
            Lagrangian::PointConormal => write!(f, "N*{{p0}}"),
            Lagrangian::Paired => write!(f, "(N*Y, Λ)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MicroOrder {
    pub value: Affine,
    pub lagrangian: Lagrangian,
}

impl MicroOrder {
    pub fn new(value: Affine, lagrangian: Lagrangian) -> Self {
        MicroOrder { value, lagrangian }
    }
}

impl fmt::Display for MicroOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I^{{{}}}({})", self.value, self.lagrangian)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("{what} must be nonnegative, got {value}")]
    Negative { what: &'static str, value: i64 },
    #[error("rule {rule} expects an order on {expected}, got {got}")]
    WrongLagrangian {
        rule: &'static str,
        expected: Lagrangian,
        got: Lagrangian,
    },
}

/// A rule with where it comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: &'static str,
    pub citation: &'static str,
    pub quote: &'static str,
}

pub const DISTORTED_WAVE: Rule = Rule {
    name: "distorted-wave",
    citation: "distorted plane waves",
    quote:
        "v = Q_g(F) ∈ I^{μ−1/2,−1/2}(N*Y, Λ); away from Y, v ∈ I^{μ−1/2}(Λ); microlocally away from Λ, v ∈ I^{μ−1}(Y)",
};
pub const DERIVATIVE: Rule = Rule {
    name: "derivative",
    citation: "conormal derivative estimate",
    quote: "∂ġ ∈ I^{μ}(N*Y) away from Λ",
};
pub const INTERACTION: Rule = Rule {
    name: "interaction",
    citation: "four-wave interaction orders",
    quote: "Q(c v1v2v3v4) ∈ I^{μ̃+3/2}; Q(a v1 V Q(b v2v3v4)) ∈ I^{μ̃+1/2}; Q(a v1 V Q(a v2 V Q(a v3v4))) ∈ I^{μ̃−1/2}",
};
pub const RESTRICTION: Rule = Rule {
    name: "restriction",
    citation: "restriction to a timelike curve",
    quote: "the restriction of f to γ, denoted by f̃ = f|_γ, is in I^{m+3/4}(γ; N*{p0})",
};
pub const TIME_INTEGRATION: Rule = Rule {
    name: "time-integration",
    citation: "geodesic perturbation",
    quote: "Solving the above equation (integrating in t twice), we get A^k(t) ∈ I^{μ−1+3/4}",
};
pub const CHRISTOFFEL: Rule = Rule {
    name: "christoffel",
    citation: "geodesic perturbation",
    quote: "By the assumption ∂_ε g̃_ε|_{ε=0} ∈ I^μ(N*S_{q0}), we know that this term is in I^{μ+1}(N*S_{q0})",
};
pub const SOURCE_REGULARITY: Rule = Rule {
    name: "source-regularity",
    citation: "source hypotheses",
    quote: "are in I^{μ+1}(N*Y), μ < −17",
};
pub const DERIVATIVE_CAP_RULE: Rule = Rule {
    name: "derivative-cap",
    citation: "reduced Ricci expansion",
    quote: "Ĥ_i are at most quadratic in ∂u_ε",
};

/// μ < −17 (axiom).
pub fn mu_threshold() -> Rational {
    int(-17)
}

/// Derivatives carried by one coefficient form (axiom, audited against the forms).
pub const DERIVATIVE_CAP: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLine {
    pub rule: Rule,
    pub input: String,
    pub output: String,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} => {}  ({}: \"{}\")",
            self.rule.name, self.input, self.output, self.rule.citation, self.rule.quote
        )
    }
}

/// Proof trace accumulated by rule applications.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace(pub Vec<TraceLine>);

impl Trace {
    fn push(&mut self, rule: Rule, input: impl fmt::Display, output: impl fmt::Display) {
        self.0.push(TraceLine {
            rule,
            input: input.to_string(),
            output: output.to_string(),
        });
    }
}

fn expect_on(rule: Rule, m: &MicroOrder, expected: Lagrangian) -> Result<(), OrderError> {
    if m.lagrangian != expected {
        return Err(OrderError::WrongLagrangian {
            rule: rule.name,
            expected,
            got: m.lagrangian,
        });
    }
    Ok(())
}

/// Source of order μ+1 on N*Y ↦ (μ−1/2 on Λ, μ−1 on N*Y away from Λ).
pub fn distorted_wave_order(source: &MicroOrder, trace: &mut Trace) -> Result<(MicroOrder, MicroOrder), OrderError> {
    expect_on(DISTORTED_WAVE, source, Lagrangian::ConormalSource)?;
    let on_flowout = MicroOrder::new(source.value.shift(&rat(-3, 2)), Lagrangian::Flowout(None));
    let off_flowout = MicroOrder::new(source.value.shift(&int(-2)), Lagrangian::ConormalSource);
    trace.push(DISTORTED_WAVE, source, format!("{on_flowout}, {off_flowout}"));
    Ok((on_flowout, off_flowout))
}

/// One derivative raises the order by one.
pub fn derivative_order(m: &MicroOrder, trace: &mut Trace) -> MicroOrder {
    let out = MicroOrder::new(m.value.shift(&int(1)), m.lagrangian);
    trace.push(DERIVATIVE, m, &out);
    out
}

/// μ̃ + 3/2 + derivative_count − 2·inner_q_count on Λ^g_q0.
pub fn interaction_order(
    mus: &[MicroOrder; 4],
    derivative_count: i64,
    inner_q_count: i64,
    trace: &mut Trace,
) -> Result<MicroOrder, OrderError> {
    if derivative_count < 0 {
        return Err(OrderError::Negative {
            what: "derivative count",
            value: derivative_count,
        });
    }
    if inner_q_count < 0 {
        return Err(OrderError::Negative {
            what: "inner Q count",
            value: inner_q_count,
        });
    }
    let total = mus.iter().skip(1).fold(mus[0].value.clone(), |acc, m| &acc + &m.value);
    let offset = rat(3, 2) + int(derivative_count) - int(2 * inner_q_count);
    let out = MicroOrder::new(total.shift(&offset), Lagrangian::InteractionCone);
    trace.push(
        INTERACTION,
        format!("μ̃ = {total}, {derivative_count} derivatives, {inner_q_count} inner Q"),
        &out,
    );
    Ok(out)
}

/// Restriction of a conormal distribution to a transversal curve.
pub fn restriction_order(m: &MicroOrder, transversal: bool, trace: &mut Trace) -> Option<MicroOrder> {
    if !transversal {
        return None;
    }
    let out = MicroOrder::new(m.value.shift(&rat(3, 4)), Lagrangian::PointConormal);
    trace.push(RESTRICTION, m, &out);
    Some(out)
}

/// n integrations along the curve, one order each.
pub fn time_integration(m: &MicroOrder, n: u32, trace: &mut Trace) -> MicroOrder {
    let out = MicroOrder::new(m.value.shift(&-int(n as i64)), m.lagrangian);
    trace.push(TIME_INTEGRATION, format!("{m}, {n} integrations"), &out);
    out
}

/// The five interaction patterns as (label, derivative count, inner Q count, quoted offset from μ̃).
pub fn interaction_patterns() -> [(&'static str, i64, i64, Rational); 5] {
    [
        ("Q(c v1v2v3v4)", 0, 0, rat(3, 2)),
        ("Q(a v1 V Q(b v2v3v4))", 1, 1, rat(1, 2)),
        ("Q(b v1v2 V Q(a v3v4))", 1, 1, rat(1, 2)),
        ("Q(a v1 V Q(a v2 V Q(a v3v4)))", 2, 2, rat(-1, 2)),
        ("Q(a V Q(a v1v2) V Q(a v3v4))", 2, 2, rat(-1, 2)),
    ]
}

/// Derivatives and inner Q's of an ℋ term, read off the forms themselves.
pub fn derivative_ledger(ast: &TermAst) -> (i64, i64) {
    fn walk(a: &TermAst, d: &mut i64) {
        match a {
            TermAst::Leaf(_) => {}
            TermAst::Q(c) => walk(c, d),
            TermAst::Form(k, cs) => {
                let form = match k.kind {
                    FormKind::G => family().get(crate::ricci::FormKey::p(k.k)),
                    _ => family().get(*k),
                };
                *d += form
                    .monomials
                    .first()
                    .map_or(0, |m| m.skeleton.derivative_count() as i64);
                cs.iter().for_each(|c| walk(c, d));
            }
        }
    }
    let mut d = 0;
    walk(ast, &mut d);
    (d, ast.q_count() as i64)
}

/// Order of Q(term) for waves in I^{μ−1/2}(Λ_i).
pub fn term_order(ast: &TermAst, trace: &mut Trace) -> Result<MicroOrder, OrderError> {
    let wave = |i| MicroOrder::new(Affine::mu_plus(rat(-1, 2)), Lagrangian::Flowout(Some(i)));
    let (d, q) = derivative_ledger(ast);
    interaction_order(&[wave(1), wave(2), wave(3), wave(4)], d, q, trace)
}

/// Monomials of the derived forms carrying more than the cap on one field.
pub fn derivative_cap_violations() -> Vec<String> {
    let fam = family();
    let mut out = Vec::new();
    for (key, form) in &fam.forms {
        for (m, line) in form.monomials.iter().zip(form.machine_lines()) {
            if m.skeleton.derivative_count() > DERIVATIVE_CAP {
                out.push(format!("{key}: {line}"));
            }
        }
    }
    out
}

/// Orders along the observing geodesic for a perturbation in I^μ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicLedger {
    pub christoffel: MicroOrder,
    pub restricted_coefficient: MicroOrder,
    pub solved_a: MicroOrder,
    pub i1: MicroOrder,
    pub i2: MicroOrder,
    pub i3_vanishes: bool,
    pub dominance_gap: Affine,
}

pub fn geodesic_perturbation_orders(wave_order: &Affine, trace: &mut Trace) -> GeodesicLedger {
    let wave = MicroOrder::new(wave_order.clone(), Lagrangian::InteractionCone);
    let christoffel = MicroOrder::new(wave.value.shift(&int(1)), Lagrangian::InteractionCone);
    trace.push(CHRISTOFFEL, &wave, &christoffel);
    let restricted = restriction_order(&christoffel, true, trace).expect("transversal");
    let solved_a = time_integration(&restricted, 2, trace);
    let i2 = solved_a.clone();
    let i1 = restriction_order(&wave, true, trace).expect("transversal");
    let dominance_gap = &i1.value - &i2.value;
    GeodesicLedger {
        christoffel,
        restricted_coefficient: restricted,
        solved_a,
        i1,
        i2,
        i3_vanishes: true,
        dominance_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_display() {
        assert_eq!(Affine::mu_plus(rat(-1, 4)).to_string(), "μ - 1/4");
        assert_eq!(
            Affine {
                mu: int(4),
                constant: rat(3, 2)
            }
            .to_string(),
            "4μ + 3/2"
        );
        assert_eq!(Affine::constant(rat(-35, 2)).to_string(), "-35/2");
        assert_eq!(Affine::mu().to_string(), "μ");
    }
}
