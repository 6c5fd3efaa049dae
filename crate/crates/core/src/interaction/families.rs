use super::ast::{enumerate_all, Shape, SignedTerm, TermAst};
use super::eval::{max_order, EvalError, Evaluator};
use crate::algebra::{rat, Rational};
use crate::null_geometry::NullConfig;
use crate::tensor::{sym_outer, Sym2T};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;

fn parse(s: &str) -> TermAst {
    s.parse().expect("family templates are well formed")
}

/// Term (a)–(f) of ℐ as (label, (i, j, k)).
pub const I_TERMS: [(char, [u8; 3]); 6] = [
    ('a', [1, 2, 3]),
    ('b', [2, 1, 3]),
    ('c', [1, 3, 2]),
    ('d', [3, 1, 2]),
    ('e', [2, 3, 1]),
    ('f', [3, 2, 1]),
];

pub fn i_term(ijk: [u8; 3]) -> SignedTerm {
    let [i, j, k] = ijk;
    SignedTerm {
        sign: -1,
        shape: Shape::H5a,
        ast: parse(&format!("P2({i},Q(P2({j},Q(P2({k},4)))))")),
    }
}

fn signed(shape: Shape, s: String) -> SignedTerm {
    SignedTerm {
        sign: shape.sign(),
        shape,
        ast: parse(&s),
    }
}

const PAIRS: [(u8, u8); 2] = [(1, 2), (2, 1)];

/// A named piece of an item: the P or Ĥ part, or one sub-case.
#[derive(Clone, Debug)]
pub struct ItemPart {
    pub label: &'static str,
    pub terms: Vec<SignedTerm>,
}

/// The families of terms attaining the top order, split into the parts the
/// reference evaluates separately.
pub fn item_parts(n: u8) -> Vec<ItemPart> {
    let part = |label, terms| ItemPart { label, terms };
    match n {
        1 => vec![part(
            "",
            PAIRS
                .iter()
                .map(|(i, j)| signed(Shape::H2a, format!("P3({i},{j},Q(P2(3,4)))")))
                .collect(),
        )],
        2 => vec![part(
            "",
            PAIRS
                .iter()
                .map(|(j, k)| signed(Shape::H3b, format!("P2(3,Q(P3({j},{k},4)))")))
                .collect(),
        )],
        3 => ["P", "H"]
            .into_iter()
            .map(|g| {
                let terms = PAIRS
                    .iter()
                    .map(|(i, j)| signed(Shape::H4, format!("P2(Q({g}2({i},{j})),Q(P2(3,4)))")));
                part(if g == "P" { "P" } else { "H" }, terms.collect())
            })
            .collect(),
        4 => vec![part("", I_TERMS.iter().map(|(_, ijk)| i_term(*ijk)).collect())],
        5 => vec![part(
            "",
            PAIRS
                .iter()
                .flat_map(|(i, j)| {
                    let inner = format!("Q(P2({j},Q(P2(3,4))))");
                    [
                        signed(Shape::H5a, format!("H2({i},{inner})")),
                        signed(Shape::H5c, format!("H2({inner},{i})")),
                    ]
                })
                .collect(),
        )],
        6 => {
            let case = |triples: [[u8; 3]; 2]| -> Vec<SignedTerm> {
                triples
                    .iter()
                    .flat_map(|[i, j, k]| {
                        let inner = format!("Q(P2({k},4))");
                        [
                            signed(Shape::H5a, format!("P2({i},Q(H2({j},{inner})))")),
                            signed(Shape::H5b, format!("P2({i},Q(H2({inner},{j})))")),
                        ]
                    })
                    .collect()
            };
            vec![
                part("k=3", case([[1, 2, 3], [2, 1, 3]])),
                part("i=3", case([[3, 2, 1], [3, 1, 2]])),
            ]
        }
        7 => vec![part(
            "",
            PAIRS
                .iter()
                .flat_map(|(k, j)| {
                    [
                        signed(Shape::H5a, format!("P2(3,Q(P2({j},Q(H2({k},4)))))")),
                        signed(Shape::H5a, format!("P2(3,Q(P2({j},Q(H2(4,{k})))))")),
                    ]
                })
                .collect(),
        )],
        8 => ["P", "H"]
            .into_iter()
            .map(|g| {
                let terms = PAIRS
                    .iter()
                    .map(|(k, l)| signed(Shape::H5b, format!("P2(3,Q(P2(Q({g}2({k},{l})),4)))")));
                part(if g == "P" { "P" } else { "H" }, terms.collect())
            })
            .collect(),
        _ => Vec::new(),
    }
}

pub fn item_terms(n: u8) -> Vec<SignedTerm> {
    item_parts(n).into_iter().flat_map(|p| p.terms).collect()
}

#[derive(Clone, Debug)]
pub struct ItemValue {
    pub item: u8,
    pub parts: Vec<(&'static str, Sym2T)>,
    pub total: Sym2T,
}

pub fn item_value(n: u8, ev: &Evaluator) -> Result<ItemValue, EvalError> {
    let mut parts = Vec::new();
    let mut total = Sym2T::zero();
    for p in item_parts(n) {
        let v = ev.sum(&p.terms)?;
        total = &total + &v;
        parts.push((p.label, v));
    }
    Ok(ItemValue { item: n, parts, total })
}

/// Leading part of `value` as c·ρ^e·(leading part of `basis`); returns (e, c).
pub fn leading_multiple(value: &Sym2T, basis: &Sym2T) -> Option<(i64, Rational)> {
    let vo = value.entry_order()?;
    let bo = basis.entry_order()?;
    let v = value.coefficients_at(vo);
    let b = basis.coefficients_at(bo);
    let mut c: Option<Rational> = None;
    for i in 0..4 {
        for j in 0..4 {
            match (v[i][j].is_zero(), b[i][j].is_zero()) {
                (true, true) => {}
                (false, false) => {
                    let r = &v[i][j] / &b[i][j];
                    match &c {
                        None => c = Some(r),
                        Some(x) if *x == r => {}
                        Some(_) => return None,
                    }
                }
                _ => return None,
            }
        }
    }
    c.map(|c| (vo - bo, c))
}

/// Reference matrices the quoted results are stated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    A4,
    A14MinusA24,
}

impl Basis {
    pub fn matrix(self, config: &NullConfig) -> Sym2T {
        match self {
            Basis::A4 => Sym2T::outer_square(config.zeta(4)),
            Basis::A14MinusA24 => {
                &sym_outer(config.zeta(1), config.zeta(4)) - &sym_outer(config.zeta(2), config.zeta(4))
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::A4 => "A(4)",
            Basis::A14MinusA24 => "[A(14)-A(24)]",
        }
    }
}

/// A quoted leading value: coefficient·ρ^exponent·basis.
#[derive(Clone, Debug)]
pub struct QuotedValue {
    pub item: u8,
    pub part: &'static str,
    pub basis: Basis,
    pub exponent: i64,
    pub coefficient: Rational,
    pub quote: &'static str,
}

pub fn quoted_item_values() -> Vec<QuotedValue> {
    let q = |item, part, basis, exponent, coefficient, quote| QuotedValue {
        item,
        part,
        basis,
        exponent,
        coefficient,
        quote,
    };
    vec![
        q(1, "", Basis::A4, 20, rat(-1, 1), "(2π)^{-3}(-1)ρ^{20}A^{(4)}"),
        q(2, "", Basis::A4, 20, rat(1, 1), "(2π)^{-3}ρ^{20}A^{(4)}"),
        q(3, "P", Basis::A4, 20, rat(-1, 2), "(2π)^{-3}(-1/2)ρ^{20}A^{(4)}"),
        q(
            3,
            "H",
            Basis::A4,
            20,
            rat(3, 2),
            "(2π)^{-3} (3/2) ρ^{20}A^{(4)} + O(ρ^{30})",
        ),
        q(
            5,
            "",
            Basis::A14MinusA24,
            30,
            rat(-3, 8),
            "(2π)^{-3} ρ^{30} (-3/8)[A^{(14)} - A^{(24)}]",
        ),
        q(
            6,
            "k=3",
            Basis::A14MinusA24,
            30,
            rat(3, 4),
            "(2π)^{-3} 3/4 ρ^{30} [A^{(14)} - A^{(24)}] + O(ρ^{30})",
        ),
        q(
            6,
            "i=3",
            Basis::A14MinusA24,
            30,
            rat(3, 8),
            "(2π)^{-3} 3/8 ρ^{30} [A^{(14)} - A^{(24)}] + O(ρ^{30})",
        ),
        q(
            7,
            "",
            Basis::A14MinusA24,
            30,
            rat(-3, 8),
            "3/8 (2π)^{-3} ρ^{30} [A^{(24)}-A^{(14)}] + O(ρ^{30})",
        ),
        q(
            8,
            "P",
            Basis::A4,
            20,
            rat(1, 2),
            "1/2 (2π)^{-3} ρ^{20} A^{(4)} + O(ρ^{30})",
        ),
        q(
            8,
            "H",
            Basis::A4,
            20,
            rat(-3, 2),
            "(2π)^{-3}(-3/2) ρ^{20} A^{(4)} + O(ρ^{30})",
        ),
    ]
}

/// Quoted A^{(4)} coefficients of terms (a)–(f) at ρ^{30} and ρ^{20}.
pub fn quoted_i_coefficients() -> [(char, Rational, Rational); 6] {
    [
        ('a', rat(-1, 4), rat(1, 4)),
        ('b', rat(1, 4), rat(1, 4)),
        ('c', rat(0, 1), rat(1, 4)),
        ('d', rat(1, 4), rat(-1, 2)),
        ('e', rat(0, 1), rat(1, 4)),
        ('f', rat(-1, 4), rat(-1, 2)),
    ]
}

/// Coefficient of ρ^e in f(ρ) for a value f(ρ)·A^{(4)}, read off the first
/// entry where A^{(4)} is nonzero.
pub fn a4_coefficient(value: &Sym2T, a4: &Sym2T, e: i64) -> Rational {
    let a4o = a4.entry_order().expect("A(4) is nonzero");
    let a = a4.coefficients_at(a4o);
    let (i, j) = (0..16)
        .map(|n| (n / 4, n % 4))
        .find(|&(i, j)| !a[i][j].is_zero())
        .unwrap();
    let v = value.get(i, j);
    if v.is_zero() {
        return Rational::zero();
    }
    let tail = crate::algebra::expand_at_infinity(v, 64).expect("entries are finite");
    tail.coeff(e + a4o) / &a[i][j]
}

#[derive(Clone, Debug)]
pub struct ICancellation {
    pub terms: Vec<(char, Sym2T)>,
    pub sum: Sym2T,
}

pub fn eval_i_cancellation(ev: &Evaluator) -> Result<ICancellation, EvalError> {
    let mut terms = Vec::new();
    for (label, ijk) in I_TERMS {
        terms.push((label, ev.contribution(&i_term(ijk))?));
    }
    let sum = terms.iter().fold(Sym2T::zero(), |acc, (_, m)| &acc + m);
    Ok(ICancellation { terms, sum })
}

/// Per-AST orders from the exhaustive scan.
#[derive(Clone, Debug)]
pub struct ScannedTerm {
    pub term: SignedTerm,
    pub exact_order: Option<i64>,
    pub predicted_order: Option<i64>,
    pub family: Option<u8>,
}

pub fn family_of(ast: &TermAst) -> Option<u8> {
    (1..=8).find(|&n| item_terms(n).iter().any(|t| &t.ast == ast))
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub scanned: Vec<ScannedTerm>,
    pub threshold: i64,
}

impl Classification {
    /// Terms at or above the threshold grouped by family; None collects the rest.
    pub fn groups(&self) -> BTreeMap<Option<u8>, Vec<&ScannedTerm>> {
        let mut out: BTreeMap<Option<u8>, Vec<&ScannedTerm>> = BTreeMap::new();
        for s in &self.scanned {
            if s.exact_order.is_some_and(|o| o >= self.threshold) {
                out.entry(s.family).or_default().push(s);
            }
        }
        out
    }

    pub fn outside_families(&self) -> Vec<&ScannedTerm> {
        self.groups().remove(&None).unwrap_or_default()
    }
}

pub fn classify_rho40_terms(ev: &Evaluator) -> Result<Classification, EvalError> {
    let terms = enumerate_all();
    let scanned = terms
        .into_par_iter()
        .map(|t| {
            let exact = ev.contribution(&t)?.entry_order();
            let predicted = max_order(&ev.predicted_order(&t.ast)?);
            let family = family_of(&t.ast);
            Ok(ScannedTerm {
                term: t,
                exact_order: exact,
                predicted_order: predicted,
                family,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(Classification { scanned, threshold: 40 })
}

/// Exact sum of every summand of ℋ₁..ℋ₅.
pub fn total_symbol(ev: &Evaluator) -> Result<Sym2T, EvalError> {
    ev.sum(&enumerate_all())
}

/// Per-group sums ℋ₁..ℋ₅.
pub fn group_sums(ev: &Evaluator) -> Result<Vec<Sym2T>, EvalError> {
    (1..=5).map(|k| ev.sum(&super::ast::enumerate_h(k))).collect()
}

/// The two quoted final forms, as leading ρ^{40} coefficient matrices.
pub fn quoted_final_forms(config: &NullConfig) -> [(&'static str, [[Rational; 4]; 4]); 2] {
    let formula = Basis::A14MinusA24.matrix(config).scale_rational(&rat(3, 8));
    let f = formula.coefficients_at(10);
    let e = |v: i64| rat(3 * v, 8);
    let displayed = [
        [e(0), e(0), e(1), e(-1)],
        [e(0), e(0), e(-1), e(1)],
        [e(1), e(-1), e(0), e(0)],
        [e(-1), e(1), e(0), e(0)],
    ];
    [("formula", f), ("displayed", displayed)]
}

/// Which final form (if any) the leading order-40 coefficients of `total` equal.
pub fn matching_final_form(total: &Sym2T, config: &NullConfig) -> Vec<&'static str> {
    if total.entry_order() != Some(40) {
        return Vec::new();
    }
    let lead = total.coefficients_at(40);
    quoted_final_forms(config)
        .into_iter()
        .filter(|(_, m)| *m == lead)
        .map(|(n, _)| n)
        .collect()
}
