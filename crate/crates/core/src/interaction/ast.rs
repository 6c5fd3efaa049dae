use crate::ricci::{FormKey, FormKind};
use itertools::Itertools;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AstError {
    #[error("cannot parse term at byte {at}: {reason}")]
    Parse { at: usize, reason: String },
    #[error("{form} takes {expected} arguments, got {got}")]
    Arity { form: FormKey, expected: usize, got: usize },
    #[error("wave index {0} is outside 1..4")]
    WaveIndex(u8),
}

/// Nested interaction term: waves, causal inverses and coefficient forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermAst {
    Leaf(u8),
    Q(Box<TermAst>),
    Form(FormKey, Vec<TermAst>),
}

impl TermAst {
    pub fn leaf(i: u8) -> Self {
        TermAst::Leaf(i)
    }

    pub fn q(child: TermAst) -> Self {
        TermAst::Q(Box::new(child))
    }

    pub fn form(key: FormKey, children: Vec<TermAst>) -> Self {
        debug_assert_eq!(key.k, children.len());
        TermAst::Form(key, children)
    }

    /// Wave labels in left-to-right order.
    pub fn leaves(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<u8>) {
        match self {
            TermAst::Leaf(i) => out.push(*i),
            TermAst::Q(c) => c.collect_leaves(out),
            TermAst::Form(_, cs) => cs.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Every wave 1..4 occurs exactly once.
    pub fn is_complete(&self) -> bool {
        let mut l = self.leaves();
        l.sort_unstable();
        l == [1, 2, 3, 4]
    }

    pub fn form_count(&self) -> usize {
        match self {
            TermAst::Leaf(_) => 0,
            TermAst::Q(c) => c.form_count(),
            TermAst::Form(_, cs) => 1 + cs.iter().map(TermAst::form_count).sum::<usize>(),
        }
    }

    pub fn q_count(&self) -> usize {
        match self {
            TermAst::Leaf(_) => 0,
            TermAst::Q(c) => 1 + c.q_count(),
            TermAst::Form(_, cs) => cs.iter().map(TermAst::q_count).sum(),
        }
    }

    pub fn contains_unsplit(&self) -> bool {
        match self {
            TermAst::Leaf(_) => false,
            TermAst::Q(c) => c.contains_unsplit(),
            TermAst::Form(k, cs) => k.kind == FormKind::G || cs.iter().any(TermAst::contains_unsplit),
        }
    }

    /// Every way of replacing each Ĝ node by P or Ĥ, P-first in pre-order.
    pub fn split(&self) -> Vec<TermAst> {
        match self {
            TermAst::Leaf(_) => vec![self.clone()],
            TermAst::Q(c) => c.split().into_iter().map(TermAst::q).collect(),
            TermAst::Form(key, cs) => {
                let kinds: Vec<FormKey> = match key.kind {
                    FormKind::G => vec![FormKey::p(key.k), FormKey::h(key.k)],
                    _ => vec![*key],
                };
                let child_options: Vec<Vec<TermAst>> = cs.iter().map(TermAst::split).collect();
                let mut out = Vec::new();
                for k in kinds {
                    for combo in child_options.iter().multi_cartesian_product() {
                        out.push(TermAst::Form(k, combo.into_iter().cloned().collect()));
                    }
                    if child_options.is_empty() {
                        out.push(TermAst::Form(k, Vec::new()));
                    }
                }
                out
            }
        }
    }

    /// Relabels waves through `map[i-1]`.
    pub fn relabel(&self, map: &[u8; 4]) -> TermAst {
        match self {
            TermAst::Leaf(i) => TermAst::Leaf(map[*i as usize - 1]),
            TermAst::Q(c) => TermAst::q(c.relabel(map)),
            TermAst::Form(k, cs) => TermAst::Form(*k, cs.iter().map(|c| c.relabel(map)).collect()),
        }
    }
}

impl fmt::Display for TermAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermAst::Leaf(i) => write!(f, "{i}"),
            TermAst::Q(c) => write!(f, "Q({c})"),
            TermAst::Form(k, cs) => write!(f, "{k}({})", cs.iter().join(",")),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> AstError {
        AstError::Parse {
            at: self.pos,
            reason: reason.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), AstError> {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn digits(&mut self) -> Result<usize, AstError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.err("expected a number"))
    }

    fn term(&mut self) -> Result<TermAst, AstError> {
        self.skip_ws();
        let Some(&c) = self.s.get(self.pos) else {
            return Err(self.err("unexpected end"));
        };
        match c {
            b'0'..=b'9' => {
                let i = self.digits()?;
                if !(1..=4).contains(&i) {
                    return Err(AstError::WaveIndex(i.min(255) as u8));
                }
                Ok(TermAst::Leaf(i as u8))
            }
            b'Q' => {
                self.pos += 1;
                self.expect(b'(')?;
                let child = self.term()?;
                self.expect(b')')?;
                Ok(TermAst::q(child))
            }
            b'P' | b'H' | b'G' => {
                self.pos += 1;
                let k = self.digits()?;
                let key = match c {
                    b'P' => FormKey::p(k),
                    b'H' => FormKey::h(k),
                    _ => FormKey::g(k),
                };
                self.expect(b'(')?;
                let mut children = vec![self.term()?];
                loop {
                    self.skip_ws();
                    match self.s.get(self.pos) {
                        Some(b',') => {
                            self.pos += 1;
                            children.push(self.term()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("expected ',' or ')'")),
                    }
                }
                if children.len() != k || !(2..=4).contains(&k) {
                    return Err(AstError::Arity {
                        form: key,
                        expected: k,
                        got: children.len(),
                    });
                }
                Ok(TermAst::Form(key, children))
            }
            _ => Err(self.err("expected a wave index, Q, P, H or G")),
        }
    }
}

impl FromStr for TermAst {
    type Err = AstError;

    fn from_str(s: &str) -> Result<Self, AstError> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }
}

/// The summand shapes of ℋ₁..ℋ₅ before the permutation sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    H1,
    H2a,
    H2b,
    H2c,
    H3a,
    H3b,
    H4,
    H5a,
    H5b,
    H5c,
    H5d,
}

impl Shape {
    pub const ALL: [Shape; 11] = [
        Shape::H1,
        Shape::H2a,
        Shape::H2b,
        Shape::H2c,
        Shape::H3a,
        Shape::H3b,
        Shape::H4,
        Shape::H5a,
        Shape::H5b,
        Shape::H5c,
        Shape::H5d,
    ];

    pub fn group(self) -> u8 {
        match self {
            Shape::H1 => 1,
            Shape::H2a | Shape::H2b | Shape::H2c => 2,
            Shape::H3a | Shape::H3b => 3,
            Shape::H4 => 4,
            _ => 5,
        }
    }

    pub fn sign(self) -> i8 {
        match self.group() {
            2 | 3 => 1,
            _ => -1,
        }
    }

    pub fn template(self) -> &'static str {
        match self {
            Shape::H1 => "G4(i,j,k,l)",
            Shape::H2a => "G3(i,j,Q(G2(k,l)))",
            Shape::H2b => "G3(i,Q(G2(j,k)),l)",
            Shape::H2c => "G3(Q(G2(i,j)),k,l)",
            Shape::H3a => "G2(Q(G3(i,j,k)),l)",
            Shape::H3b => "G2(i,Q(G3(j,k,l)))",
            Shape::H4 => "G2(Q(G2(i,j)),Q(G2(k,l)))",
            Shape::H5a => "G2(i,Q(G2(j,Q(G2(k,l)))))",
            Shape::H5b => "G2(i,Q(G2(Q(G2(j,k)),l)))",
            Shape::H5c => "G2(Q(G2(i,Q(G2(j,k)))),l)",
            Shape::H5d => "G2(Q(G2(Q(G2(i,j)),k)),l)",
        }
    }

    /// Instantiates the template with (i,j,k,l) = perm.
    pub fn instantiate(self, perm: [u8; 4]) -> TermAst {
        let s: String = self
            .template()
            .chars()
            .map(|c| match c {
                'i' => char::from(b'0' + perm[0]),
                'j' => char::from(b'0' + perm[1]),
                'k' => char::from(b'0' + perm[2]),
                'l' => char::from(b'0' + perm[3]),
                other => other,
            })
            .collect();
        s.parse().expect("templates are well formed")
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// One summand of ℋ with its sign.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedTerm {
    pub sign: i8,
    pub shape: Shape,
    pub ast: TermAst,
}

pub fn permutations4() -> Vec<[u8; 4]> {
    (1u8..=4).permutations(4).map(|p| [p[0], p[1], p[2], p[3]]).collect()
}

/// ℋ_k summands with Ĝ nodes left unsplit.
pub fn enumerate_shapes(k: u8) -> Vec<SignedTerm> {
    let perms = permutations4();
    Shape::ALL
        .iter()
        .filter(|s| s.group() == k)
        .flat_map(|&shape| {
            perms.iter().map(move |&p| SignedTerm {
                sign: shape.sign(),
                shape,
                ast: shape.instantiate(p),
            })
        })
        .collect()
}

/// ℋ_k summands with every Ĝ split into P and Ĥ.
pub fn enumerate_h(k: u8) -> Vec<SignedTerm> {
    enumerate_shapes(k)
        .into_iter()
        .flat_map(|t| {
            t.ast.split().into_iter().map(move |ast| SignedTerm {
                sign: t.sign,
                shape: t.shape,
                ast,
            })
        })
        .collect()
}

pub fn enumerate_all() -> Vec<SignedTerm> {
    (1..=5).flat_map(enumerate_h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["P2(1,Q(P2(3,4)))", "H3(Q(G2(1,2)),3,4)", "P4(4,3,2,1)"] {
            let t: TermAst = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("P2(1,2,3)".parse::<TermAst>().is_err());
        assert!("P2(1,5)".parse::<TermAst>().is_err());
        assert!("Q(1".parse::<TermAst>().is_err());
    }

    #[test]
    fn shape_counts() {
        let counts: Vec<usize> = (1..=5).map(|k| enumerate_shapes(k).len()).collect();
        assert_eq!(counts, [24, 72, 48, 24, 96]);
        let split: Vec<usize> = (1..=5).map(|k| enumerate_h(k).len()).collect();
        assert_eq!(split, [48, 288, 192, 192, 768]);
        for t in enumerate_all() {
            assert!(t.ast.is_complete());
            assert!(!t.ast.contains_unsplit());
        }
    }

    #[test]
    fn enumeration_closed_under_derivative_swap() {
        use std::collections::HashSet;
        let all: HashSet<TermAst> = enumerate_all().into_iter().map(|t| t.ast).collect();
        for t in &all {
            if let TermAst::Form(k, cs) = t {
                if k.kind == FormKind::H && k.k == 2 {
                    let swapped = TermAst::Form(*k, vec![cs[1].clone(), cs[0].clone()]);
                    assert!(all.contains(&swapped), "{t}");
                }
            }
        }
    }
}
