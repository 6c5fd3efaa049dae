//! Formal perturbative expansion of the reduced Ricci tensor around a constant
//! background metric h, and contraction of the resulting multilinear forms.
//!
//! A monomial is stored as a skeleton: every index position of every field is
//! either a free index or is linked to another position through h^{-1}. Fields
//! are numbered by slot; undifferentiated slots come first, then differentiated
//! ones, each group in order of appearance in the expansion.

use crate::algebra::{int, rat, Poly, Rational, RhoRational};
use crate::tensor::{CoVec4, Metric4, Sym2T};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("form has {expected} slots but {got} were assigned")]
    MissingSlot { expected: usize, got: usize },
    #[error("form has {0} free indices; a two-tensor needs exactly 2")]
    NotTwoTensor(usize),
    #[error("index structure is not a valid contraction: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    Free(u8),
    Link(u8, u8),
}

/// One occurrence of the perturbation: positions 0 and 1 are its lower pair,
/// positions 2.. its derivative indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    pub slot: u8,
    pub derivs: u8,
    pub ends: Vec<Endpoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Skeleton {
    pub fields: Vec<Field>,
    /// Bare factors h^{ab} joining two free upper indices.
    pub bare: Vec<(u8, u8)>,
}

impl Skeleton {
    pub fn derivative_count(&self) -> usize {
        self.fields.iter().map(|f| f.derivs as usize).sum()
    }

    pub fn max_derivs_on_one_field(&self) -> u8 {
        self.fields.iter().map(|f| f.derivs).max().unwrap_or(0)
    }

    pub fn link_count(&self) -> usize {
        let positions: usize = self.fields.iter().map(|f| f.ends.len()).sum();
        let frees = self
            .fields
            .iter()
            .flat_map(|f| &f.ends)
            .filter(|e| matches!(e, Endpoint::Free(_)))
            .count();
        (positions - frees) / 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: Rational,
    pub skeleton: Skeleton,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeIndex {
    pub name: String,
    pub upper: bool,
}

impl FreeIndex {
    fn lower(name: &str) -> Self {
        FreeIndex {
            name: name.to_string(),
            upper: false,
        }
    }
    fn upper(name: &str) -> Self {
        FreeIndex {
            name: name.to_string(),
            upper: true,
        }
    }
}

/// Canonical multilinear form: monomials sorted by skeleton, coefficients merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalTensorPoly {
    pub free: Vec<FreeIndex>,
    pub arity: usize,
    pub monomials: Vec<Monomial>,
}

impl FormalTensorPoly {
    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        if c.is_zero() {
            out.monomials.clear();
        }
        for m in &mut out.monomials {
            m.coeff = &m.coeff * c;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.free, other.free, "adding forms with different free indices");
        let mut acc: BTreeMap<Skeleton, Rational> = BTreeMap::new();
        for m in self.monomials.iter().chain(&other.monomials) {
            *acc.entry(m.skeleton.clone()).or_insert_with(Rational::zero) += &m.coeff;
        }
        FormalTensorPoly {
            free: self.free.clone(),
            arity: self.arity.max(other.arity),
            monomials: collect(acc),
        }
    }

    /// Number of derivatives carried by each slot, if it is the same in every monomial.
    pub fn derivative_profile(&self) -> Option<Vec<u8>> {
        let mut profile: Option<Vec<u8>> = None;
        for m in &self.monomials {
            let mut p = vec![0u8; self.arity];
            for f in &m.skeleton.fields {
                p[f.slot as usize] = f.derivs;
            }
            match &profile {
                None => profile = Some(p),
                Some(q) if *q == p => {}
                Some(_) => return None,
            }
        }
        profile
    }

    /// Contracts the form over a concrete scalar ring. The output lists the
    /// components with the first free index varying slowest.
    pub fn contract<R: crate::algebra::Ring>(
        &self,
        slots: &[SlotData<R>],
        g_up: &[[R; 4]; 4],
    ) -> Result<Vec<R>, FormError> {
        if slots.len() < self.arity {
            return Err(FormError::MissingSlot {
                expected: self.arity,
                got: slots.len(),
            });
        }
        let n = 4usize.pow(self.free.len() as u32);
        let mut out = vec![R::zero(); n];
        for m in &self.monomials {
            let value = contract_skeleton(&m.skeleton, &self.free, slots, g_up)?;
            let c = R::from_rational(&m.coeff);
            for (o, v) in out.iter_mut().zip(value) {
                if !v.is_zero() {
                    o.add_assign_ref(&c.mul_ref(&v));
                }
            }
        }
        Ok(out)
    }

    pub fn machine_lines(&self) -> Vec<String> {
        self.monomials
            .iter()
            .map(|m| {
                let fields: Vec<String> = m
                    .skeleton
                    .fields
                    .iter()
                    .map(|f| {
                        let ends: Vec<String> = f
                            .ends
                            .iter()
                            .map(|e| match e {
                                Endpoint::Free(k) => format!("F{}", k),
                                Endpoint::Link(g, p) => format!("L{}.{}", g, p),
                            })
                            .collect();
                        format!("{}:{}:{}", f.slot, f.derivs, ends.join(","))
                    })
                    .collect();
                let bare: Vec<String> = m.skeleton.bare.iter().map(|(a, b)| format!("{}-{}", a, b)).collect();
                format!("coeff={} fields={} bare={}", m.coeff, fields.join(";"), bare.join(","))
            })
            .collect()
    }
}

fn collect(acc: BTreeMap<Skeleton, Rational>) -> Vec<Monomial> {
    acc.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(skeleton, coeff)| Monomial { coeff, skeleton })
        .collect()
}

/// Index notation with lower indices throughout; a letter that appears twice is
/// contracted through the inverse background metric.
impl fmt::Display for FormalTensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        const LETTERS: &[u8] = b"abcdefghjkmnpqrstwxyz";
        for (i, m) in self.monomials.iter().enumerate() {
            let mut names: BTreeMap<(u8, u8), String> = BTreeMap::new();
            let mut next = 0;
            for (fi, fl) in m.skeleton.fields.iter().enumerate() {
                for (p, e) in fl.ends.iter().enumerate() {
                    let key = (fi as u8, p as u8);
                    if names.contains_key(&key) {
                        continue;
                    }
                    let name = match e {
                        Endpoint::Free(k) => self.free[*k as usize].name.clone(),
                        Endpoint::Link(g, q) => {
                            let l = (LETTERS[next % LETTERS.len()] as char).to_string();
                            next += 1;
                            names.insert((*g, *q), l.clone());
                            l
                        }
                    };
                    names.insert(key, name);
                }
            }
            let neg = m.coeff < Rational::zero();
            let mag = if neg { -&m.coeff } else { m.coeff.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write!(f, "{}", mag)?;
            for (a, b) in &m.skeleton.bare {
                write!(
                    f,
                    " h^{{{}{}}}",
                    self.free[*a as usize].name, self.free[*b as usize].name
                )?;
            }
            for (fi, fl) in m.skeleton.fields.iter().enumerate() {
                let idx = |p: usize| names[&(fi as u8, p as u8)].clone();
                write!(f, " ")?;
                if fl.derivs > 0 {
                    let ds: Vec<String> = (2..fl.ends.len()).map(idx).collect();
                    write!(f, "d_{{{}}}", ds.join(""))?;
                }
                write!(f, "u{}_{{{}{}}}", fl.slot + 1, idx(0), idx(1))?;
            }
        }
        Ok(())
    }
}

/// Symbol data bound to one slot: the matrix replacing u and the covector replacing ∂.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotData<R> {
    pub matrix: [[R; 4]; 4],
    pub covector: [R; 4],
}

fn rmul<R: crate::algebra::Ring>(rows: &[[R; 4]], m: &[[R; 4]; 4]) -> Vec<[R; 4]> {
    rows.iter()
        .map(|row| {
            std::array::from_fn(|j| {
                let mut acc = R::zero();
                for (k, r) in row.iter().enumerate() {
                    if !r.is_zero() && !m[k][j].is_zero() {
                        acc.add_assign_ref(&r.mul_ref(&m[k][j]));
                    }
                }
                acc
            })
        })
        .collect()
}

fn rdot<R: crate::algebra::Ring>(rows: &[[R; 4]], v: &[R; 4]) -> Vec<R> {
    rows.iter()
        .map(|row| {
            let mut acc = R::zero();
            for (r, x) in row.iter().zip(v) {
                if !r.is_zero() && !x.is_zero() {
                    acc.add_assign_ref(&r.mul_ref(x));
                }
            }
            acc
        })
        .collect()
}

fn identity_rows<R: crate::algebra::Ring>() -> Vec<[R; 4]> {
    (0..4)
        .map(|i| std::array::from_fn(|j| if i == j { R::one() } else { R::zero() }))
        .collect()
}

/// A factor of the contracted value depending on at most two free indices.
enum Component<R> {
    Scalar(R),
    Vector(u8, Vec<R>),
    Matrix(u8, u8, Vec<[R; 4]>),
}

/// The index graph of a monomial has maximum degree two, so it splits into
/// paths and cycles, each a chain of matrix products.
fn contract_skeleton<R: crate::algebra::Ring>(
    sk: &Skeleton,
    free: &[FreeIndex],
    slots: &[SlotData<R>],
    g: &[[R; 4]; 4],
) -> Result<Vec<R>, FormError> {
    let data = |f: usize| &slots[sk.fields[f].slot as usize];
    let mut seen: Vec<Vec<bool>> = sk.fields.iter().map(|f| vec![false; f.ends.len()]).collect();
    let mut comps: Vec<Component<R>> = Vec::new();
    let mut free_done = vec![false; free.len()];
    let malformed = |s: &str| FormError::Malformed(s.to_string());

    for &(a, b) in &sk.bare {
        comps.push(Component::Matrix(a, b, g.to_vec()));
        free_done[a as usize] = true;
        free_done[b as usize] = true;
    }

    // Follows a chain starting with `rows` to be plugged into position (f, p).
    // Returns the rows after reaching a vector end, or the terminating free index.
    let walk = |mut rows: Vec<[R; 4]>,
                mut f: usize,
                mut p: usize,
                seen: &mut Vec<Vec<bool>>|
     -> Result<(Vec<R>, Option<(Vec<[R; 4]>, u8)>), FormError> {
        loop {
            seen[f][p] = true;
            if p >= 2 {
                return Ok((rdot(&rows, &data(f).covector), None));
            }
            let q = 1 - p;
            seen[f][q] = true;
            rows = rmul(&rows, &data(f).matrix);
            match &sk.fields[f].ends[q] {
                Endpoint::Free(k) => {
                    if free[*k as usize].upper {
                        rows = rmul(&rows, g);
                    }
                    return Ok((Vec::new(), Some((rows, *k))));
                }
                Endpoint::Link(nf, np) => {
                    rows = rmul(&rows, g);
                    f = *nf as usize;
                    p = *np as usize;
                    if seen[f][p] {
                        return Err(FormError::Malformed("chain revisits a position".into()));
                    }
                }
            }
        }
    };

    for k in 0..free.len() {
        if free_done[k] {
            continue;
        }
        let start = sk
            .fields
            .iter()
            .enumerate()
            .find_map(|(f, fl)| {
                fl.ends
                    .iter()
                    .position(|e| *e == Endpoint::Free(k as u8))
                    .map(|p| (f, p))
            })
            .ok_or_else(|| malformed("free index does not occur"))?;
        let rows = if free[k].upper { g.to_vec() } else { identity_rows() };
        free_done[k] = true;
        match walk(rows, start.0, start.1, &mut seen)? {
            (v, None) => comps.push(Component::Vector(k as u8, v)),
            (_, Some((rows, k2))) => {
                free_done[k2 as usize] = true;
                comps.push(Component::Matrix(k as u8, k2, rows));
            }
        }
    }

    for f in 0..sk.fields.len() {
        for p in 2..sk.fields[f].ends.len() {
            if seen[f][p] {
                continue;
            }
            seen[f][p] = true;
            let Endpoint::Link(nf, np) = sk.fields[f].ends[p] else {
                return Err(malformed("unvisited free endpoint"));
            };
            let rows = rmul(&[data(f).covector.clone()], g);
            match walk(rows, nf as usize, np as usize, &mut seen)? {
                (v, None) => comps.push(Component::Scalar(v.into_iter().next().unwrap())),
                _ => return Err(malformed("vector chain ends at a free index")),
            }
        }
    }

    for f in 0..sk.fields.len() {
        if seen[f][0] {
            continue;
        }
        // Cycle through matrix ends only: trace of the product.
        let mut rows = identity_rows::<R>();
        let (mut cf, mut cp) = (f, 0usize);
        loop {
            seen[cf][cp] = true;
            let q = 1 - cp;
            seen[cf][q] = true;
            rows = rmul(&rows, &data(cf).matrix);
            let Endpoint::Link(nf, np) = sk.fields[cf].ends[q] else {
                return Err(malformed("cycle reaches a free index"));
            };
            rows = rmul(&rows, g);
            if (nf as usize, np as usize) == (f, 0) {
                break;
            }
            cf = nf as usize;
            cp = np as usize;
            if cp >= 2 {
                return Err(malformed("cycle reaches a derivative"));
            }
        }
        let mut tr = R::zero();
        for (i, row) in rows.iter().enumerate() {
            tr.add_assign_ref(&row[i]);
        }
        comps.push(Component::Scalar(tr));
    }

    let n = free.len();
    let mut out = Vec::with_capacity(4usize.pow(n as u32));
    let mut scalar = R::one();
    for c in &comps {
        if let Component::Scalar(s) = c {
            scalar = scalar.mul_ref(s);
        }
    }
    if scalar.is_zero() {
        return Ok(vec![R::zero(); 4usize.pow(n as u32)]);
    }
    for flat in 0..4usize.pow(n as u32) {
        let digit = |k: u8| (flat / 4usize.pow((n - 1 - k as usize) as u32)) % 4;
        let mut v = scalar.clone();
        for c in &comps {
            match c {
                Component::Scalar(_) => {}
                Component::Vector(k, vec) => v = v.mul_ref(&vec[digit(*k)]),
                Component::Matrix(a, b, rows) => v = v.mul_ref(&rows[digit(*a)][digit(*b)]),
            }
            if v.is_zero() {
                break;
            }
        }
        out.push(v);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Raw index expressions and canonicalization.

type Idx = u32;

#[derive(Clone, Debug)]
enum RawFactor {
    Up(Idx, Idx),
    Down(Idx, Idx),
    U { lower: [Idx; 2], derivs: Vec<Idx> },
}

#[derive(Clone, Debug)]
struct RawTerm {
    coeff: Rational,
    factors: Vec<RawFactor>,
}

impl RawTerm {
    fn degree(&self) -> usize {
        self.factors.iter().filter(|f| matches!(f, RawFactor::U { .. })).count()
    }
}

/// Sum of products of h^{..}, h_{..} and perturbation factors, with explicit
/// index names. Indices below `FREE_LIMIT` are free.
#[derive(Clone, Debug, Default)]
struct RawExpr {
    terms: Vec<RawTerm>,
}

const FREE_LIMIT: Idx = 8;

impl RawExpr {
    fn single(coeff: Rational, factors: Vec<RawFactor>) -> Self {
        RawExpr {
            terms: vec![RawTerm { coeff, factors }],
        }
    }

    fn sum(parts: Vec<RawExpr>) -> Self {
        RawExpr {
            terms: parts.into_iter().flat_map(|p| p.terms).collect(),
        }
    }

    fn scale(mut self, c: &Rational) -> Self {
        for t in &mut self.terms {
            t.coeff = &t.coeff * c;
        }
        self
    }

    /// Product keeping only terms with at most `cap` perturbation factors.
    fn times(&self, other: &RawExpr, cap: usize) -> RawExpr {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                if a.degree() + b.degree() > cap {
                    continue;
                }
                let mut factors = a.factors.clone();
                factors.extend(b.factors.iter().cloned());
                terms.push(RawTerm {
                    coeff: &a.coeff * &b.coeff,
                    factors,
                });
            }
        }
        RawExpr { terms }
    }

    fn product(parts: &[RawExpr], cap: usize) -> RawExpr {
        parts
            .iter()
            .fold(RawExpr::single(Rational::one(), vec![]), |acc, p| acc.times(p, cap))
    }
}

struct Names {
    next: Idx,
}

impl Names {
    fn new() -> Self {
        Names { next: FREE_LIMIT }
    }
    fn fresh(&mut self) -> Idx {
        self.next += 1;
        self.next
    }
}

fn u(a: Idx, b: Idx) -> RawFactor {
    RawFactor::U {
        lower: [a, b],
        derivs: vec![],
    }
}

fn du(a: Idx, b: Idx, d: &[Idx]) -> RawFactor {
    RawFactor::U {
        lower: [a, b],
        derivs: d.to_vec(),
    }
}

/// g^{ab} = Σ_n (−1)^n (h^{-1} u)^n h^{-1}, through order `order`.
fn g_up(names: &mut Names, a: Idx, b: Idx, order: usize) -> RawExpr {
    let mut parts = Vec::new();
    for n in 0..=order {
        let mut factors = Vec::new();
        let mut cur = a;
        for _ in 0..n {
            let (x, y) = (names.fresh(), names.fresh());
            factors.push(RawFactor::Up(cur, x));
            factors.push(u(x, y));
            cur = y;
        }
        factors.push(RawFactor::Up(cur, b));
        parts.push(RawExpr::single(int(if n % 2 == 0 { 1 } else { -1 }), factors));
    }
    RawExpr::sum(parts)
}

fn g_down(a: Idx, b: Idx) -> RawExpr {
    RawExpr::sum(vec![
        RawExpr::single(Rational::one(), vec![RawFactor::Down(a, b)]),
        RawExpr::single(Rational::one(), vec![u(a, b)]),
    ])
}

/// 𝒢_{λαβ}(u) = ½(∂_β u_{λα} + ∂_α u_{λβ} − ∂_λ u_{αβ}).
fn cal_g(l: Idx, a: Idx, b: Idx) -> RawExpr {
    RawExpr::sum(vec![
        RawExpr::single(rat(1, 2), vec![du(l, a, &[b])]),
        RawExpr::single(rat(1, 2), vec![du(l, b, &[a])]),
        RawExpr::single(rat(-1, 2), vec![du(a, b, &[l])]),
    ])
}

fn rename(factors: &mut [RawFactor], from: Idx, to: Idx) {
    let r = |x: &mut Idx| {
        if *x == from {
            *x = to
        }
    };
    for f in factors {
        match f {
            RawFactor::Up(a, b) | RawFactor::Down(a, b) => {
                r(a);
                r(b);
            }
            RawFactor::U { lower, derivs } => {
                lower.iter_mut().for_each(r);
                derivs.iter_mut().for_each(r);
            }
        }
    }
}

/// Removes every h_{ps} h^{pq} pair, renaming to δ.
fn eliminate_deltas(mut t: RawTerm) -> Result<RawTerm, FormError> {
    loop {
        let mut hit = None;
        'search: for (i, f) in t.factors.iter().enumerate() {
            if let RawFactor::Down(p, s) = f {
                for (j, h) in t.factors.iter().enumerate() {
                    if let RawFactor::Up(x, y) = h {
                        for (shared, keep) in [(*p, *s), (*s, *p)] {
                            let other = if *x == shared {
                                *y
                            } else if *y == shared {
                                *x
                            } else {
                                continue;
                            };
                            hit = Some((i, j, keep, other));
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((i, j, keep, other)) = hit else { break };
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        t.factors.remove(hi);
        t.factors.remove(lo);
        if keep == other {
            t.coeff *= int(4);
        } else if other < FREE_LIMIT {
            if keep < FREE_LIMIT {
                return Err(FormError::Malformed("delta between two free indices".into()));
            }
            rename(&mut t.factors, keep, other);
        } else {
            rename(&mut t.factors, other, keep);
        }
    }
    if t.factors.iter().any(|f| matches!(f, RawFactor::Down(..))) {
        return Err(FormError::Malformed("uncontracted lower background metric".into()));
    }
    Ok(t)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Occ {
    Pos(usize, usize),
    Up(usize),
}

fn skeleton_of(t: &RawTerm, free: &[FreeIndex]) -> Result<Skeleton, FormError> {
    let mut order: Vec<usize> = Vec::new();
    let us: Vec<(&[Idx; 2], &Vec<Idx>)> = t
        .factors
        .iter()
        .filter_map(|f| match f {
            RawFactor::U { lower, derivs } => Some((lower, derivs)),
            _ => None,
        })
        .collect();
    order.extend((0..us.len()).filter(|&i| us[i].1.is_empty()));
    order.extend((0..us.len()).filter(|&i| !us[i].1.is_empty()));
    let mut occ: BTreeMap<Idx, Vec<Occ>> = BTreeMap::new();
    for (slot, &i) in order.iter().enumerate() {
        let (lower, derivs) = us[i];
        for (p, x) in lower.iter().chain(derivs.iter()).enumerate() {
            occ.entry(*x).or_default().push(Occ::Pos(slot, p));
        }
    }
    let ups: Vec<(Idx, Idx)> = t
        .factors
        .iter()
        .filter_map(|f| match f {
            RawFactor::Up(a, b) => Some((*a, *b)),
            _ => None,
        })
        .collect();
    for (k, (a, b)) in ups.iter().enumerate() {
        occ.entry(*a).or_default().push(Occ::Up(k));
        occ.entry(*b).or_default().push(Occ::Up(k));
    }
    let bad = |s: &str| FormError::Malformed(s.to_string());
    let mut fields: Vec<Field> = order
        .iter()
        .enumerate()
        .map(|(slot, &i)| Field {
            slot: slot as u8,
            derivs: us[i].1.len() as u8,
            ends: vec![Endpoint::Free(u8::MAX); 2 + us[i].1.len()],
        })
        .collect();
    let mut bare = Vec::new();
    // Resolve one end of an h^{..} factor to the field position or free index behind it.
    let across = |idx: Idx, k: usize| -> Result<Result<(usize, usize), u8>, FormError> {
        if idx < FREE_LIMIT {
            return Ok(Err(idx as u8));
        }
        let o = &occ[&idx];
        let other = o
            .iter()
            .find(|x| **x != Occ::Up(k))
            .ok_or_else(|| bad("dangling index"))?;
        match other {
            Occ::Pos(f, p) => Ok(Ok((*f, *p))),
            Occ::Up(_) => Err(bad("consecutive inverse metrics")),
        }
    };
    for (k, (a, b)) in ups.iter().enumerate() {
        match (across(*a, k)?, across(*b, k)?) {
            (Ok((f1, p1)), Ok((f2, p2))) => {
                fields[f1].ends[p1] = Endpoint::Link(f2 as u8, p2 as u8);
                fields[f2].ends[p2] = Endpoint::Link(f1 as u8, p1 as u8);
            }
            (Ok((f, p)), Err(k)) | (Err(k), Ok((f, p))) => {
                if !free[k as usize].upper {
                    return Err(bad("lower free index on an inverse metric"));
                }
                fields[f].ends[p] = Endpoint::Free(k);
            }
            (Err(x), Err(y)) => bare.push((x.min(y), x.max(y))),
        }
    }
    for (idx, o) in &occ {
        let positions: Vec<(usize, usize)> = o
            .iter()
            .filter_map(|x| match x {
                Occ::Pos(f, p) => Some((*f, *p)),
                _ => None,
            })
            .collect();
        if *idx < FREE_LIMIT {
            for (f, p) in positions {
                if free[*idx as usize].upper {
                    return Err(bad("upper free index on a field"));
                }
                fields[f].ends[p] = Endpoint::Free(*idx as u8);
            }
        } else if positions.len() == 2 {
            return Err(bad("two lower indices contracted without a metric"));
        }
    }
    if fields
        .iter()
        .flat_map(|f| &f.ends)
        .any(|e| *e == Endpoint::Free(u8::MAX))
    {
        return Err(bad("unresolved index position"));
    }
    Ok(canonical(fields, bare))
}

/// Minimum skeleton over swaps of each lower pair and each derivative pair.
fn canonical(fields: Vec<Field>, mut bare: Vec<(u8, u8)>) -> Skeleton {
    bare.sort();
    let swappable: Vec<usize> = fields.iter().map(|f| if f.derivs == 2 { 2 } else { 1 }).collect();
    let bits: usize = swappable.iter().sum();
    let mut best: Option<Skeleton> = None;
    for mask in 0..(1usize << bits) {
        let mut perms: Vec<Vec<u8>> = Vec::with_capacity(fields.len());
        let mut bit = 0;
        for (f, fl) in fields.iter().enumerate() {
            let mut perm: Vec<u8> = (0..fl.ends.len() as u8).collect();
            if mask >> bit & 1 == 1 {
                perm.swap(0, 1);
            }
            if swappable[f] == 2 && mask >> (bit + 1) & 1 == 1 {
                perm.swap(2, 3);
            }
            bit += swappable[f];
            perms.push(perm);
        }
        let new_fields: Vec<Field> = fields
            .iter()
            .enumerate()
            .map(|(f, fl)| {
                let mut ends = fl.ends.clone();
                for (p, e) in fl.ends.iter().enumerate() {
                    ends[perms[f][p] as usize] = match e {
                        Endpoint::Free(k) => Endpoint::Free(*k),
                        Endpoint::Link(g, q) => Endpoint::Link(*g, perms[*g as usize][*q as usize]),
                    };
                }
                Field {
                    slot: fl.slot,
                    derivs: fl.derivs,
                    ends,
                }
            })
            .collect();
        let cand = Skeleton {
            fields: new_fields,
            bare: bare.clone(),
        };
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap()
}

fn canonicalize(expr: RawExpr, free: Vec<FreeIndex>, arity: usize) -> Result<FormalTensorPoly, FormError> {
    let mut acc: BTreeMap<Skeleton, Rational> = BTreeMap::new();
    for t in expr.terms {
        let t = eliminate_deltas(t)?;
        let sk = skeleton_of(&t, &free)?;
        *acc.entry(sk).or_insert_with(Rational::zero) += t.coeff;
    }
    Ok(FormalTensorPoly {
        free,
        arity,
        monomials: collect(acc),
    })
}

const MU: Idx = 0;
const NU: Idx = 1;

fn munu() -> Vec<FreeIndex> {
    vec![FreeIndex::lower("μ"), FreeIndex::lower("ν")]
}

// ---------------------------------------------------------------------------
// Public expansion operations.

/// Terms n = 0..=order of the Neumann series (−1)^n (h^{-1}u)^n h^{-1}.
pub fn metric_inverse_series(order: usize) -> Vec<FormalTensorPoly> {
    (0..=order)
        .map(|n| {
            let mut names = Names::new();
            let series = g_up(&mut names, 0, 1, n);
            let term = RawExpr {
                terms: series.terms.into_iter().filter(|t| t.degree() == n).collect(),
            };
            canonicalize(term, vec![FreeIndex::upper("a"), FreeIndex::upper("b")], n).expect("series is well formed")
        })
        .collect()
}

/// 𝒢_{λαβ}(u) as a one-slot, one-derivative form.
pub fn christoffel_form() -> FormalTensorPoly {
    let free = vec![FreeIndex::lower("λ"), FreeIndex::lower("α"), FreeIndex::lower("β")];
    canonicalize(cal_g(0, 1, 2), free, 1).expect("christoffel form is well formed")
}

/// Homogeneous part of the reduced Ricci tensor, split by derivative placement.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciOrder {
    pub order: usize,
    /// Both derivatives on a single slot.
    pub quasilinear: FormalTensorPoly,
    /// Derivatives on two different slots.
    pub semilinear: FormalTensorPoly,
    /// Monomials with fewer than two derivatives, dropped.
    pub discarded: usize,
}

fn ricci_raw(k: usize) -> RawExpr {
    let mut n = Names::new();
    let cap = k;
    let (p, q) = (n.fresh(), n.fresh());
    let t0 = RawExpr::product(
        &[
            g_up(&mut n, p, q, cap),
            RawExpr::single(rat(-1, 2), vec![du(MU, NU, &[p, q])]),
        ],
        cap,
    );

    let (a, b, p, s, l, gm) = (n.fresh(), n.fresh(), n.fresh(), n.fresh(), n.fresh(), n.fresh());
    let t1 = RawExpr::product(
        &[
            g_up(&mut n, a, b, cap),
            g_down(p, s),
            g_up(&mut n, p, l, cap),
            cal_g(l, MU, b),
            g_up(&mut n, s, gm, cap),
            cal_g(gm, NU, a),
        ],
        cap,
    );

    let half_term = |n: &mut Names, x: Idx, y: Idx| {
        let (l, lam, a, q, b, d) = (n.fresh(), n.fresh(), n.fresh(), n.fresh(), n.fresh(), n.fresh());
        RawExpr::product(
            &[
                g_down(y, l),
                g_up(n, l, lam, cap),
                cal_g(lam, a, b),
                g_up(n, a, q, cap),
                g_up(n, b, d, cap),
                RawExpr::single(rat(1, 2), vec![du(q, d, &[x])]),
            ],
            cap,
        )
    };
    let t2 = half_term(&mut n, MU, NU);
    let t3 = half_term(&mut n, NU, MU);
    let all = RawExpr::sum(vec![t0, t1, t2, t3]);
    RawExpr {
        terms: all.terms.into_iter().filter(|t| t.degree() == k).collect(),
    }
}

/// Homogeneity-k part of the reduced Ricci tensor in the Minkowski frame.
pub fn reduced_ricci_expansion(k: usize) -> RicciOrder {
    assert!((1..=4).contains(&k), "homogeneity must be 1..=4");
    let full = canonicalize(ricci_raw(k), munu(), k).expect("ricci expansion is well formed");
    let mut quasi = Vec::new();
    let mut semi = Vec::new();
    let mut discarded = 0;
    for m in full.monomials {
        if m.skeleton.derivative_count() < 2 {
            discarded += 1;
        } else if m.skeleton.max_derivs_on_one_field() == 2 {
            quasi.push(m);
        } else {
            semi.push(m);
        }
    }
    RicciOrder {
        order: k,
        quasilinear: FormalTensorPoly {
            free: munu(),
            arity: k,
            monomials: quasi,
        },
        semilinear: FormalTensorPoly {
            free: munu(),
            arity: k,
            monomials: semi,
        },
        discarded,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FormKind {
    P,
    H,
    /// Ĝ = P + Ĥ before splitting; never evaluated directly.
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormKey {
    pub kind: FormKind,
    pub k: usize,
}

impl FormKey {
    pub const fn p(k: usize) -> Self {
        FormKey { kind: FormKind::P, k }
    }
    pub const fn h(k: usize) -> Self {
        FormKey { kind: FormKind::H, k }
    }
    pub const fn g(k: usize) -> Self {
        FormKey { kind: FormKind::G, k }
    }
}

impl fmt::Display for FormKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FormKind::P => write!(f, "P{}", self.k),
            FormKind::H => write!(f, "H{}", self.k),
            FormKind::G => write!(f, "G{}", self.k),
        }
    }
}

/// The forms entering the interaction terms, normalized as twice the reduced
/// Ricci tensor so that P₂ = (h⁻¹u₁h⁻¹)^{pq}∂_p∂_q u₂ with unit coefficient.
#[derive(Clone, Debug)]
pub struct FormFamily {
    pub forms: BTreeMap<FormKey, FormalTensorPoly>,
    /// Twice the k = 1 part: −h^{pq}∂_p∂_q u.
    pub wave_part: FormalTensorPoly,
    pub discarded: usize,
}

impl FormFamily {
    pub fn derive() -> Self {
        let two = int(2);
        let mut forms = BTreeMap::new();
        let mut discarded = 0;
        for k in 2..=4 {
            let r = reduced_ricci_expansion(k);
            discarded += r.discarded;
            forms.insert(FormKey::p(k), r.quasilinear.scale(&two));
            forms.insert(FormKey::h(k), r.semilinear.scale(&two));
        }
        let r1 = reduced_ricci_expansion(1);
        discarded += r1.discarded;
        FormFamily {
            forms,
            wave_part: r1.quasilinear.scale(&two),
            discarded,
        }
    }

    pub fn get(&self, key: FormKey) -> &FormalTensorPoly {
        &self.forms[&key]
    }
}

/// The derived family, computed once per process.
pub fn family() -> &'static FormFamily {
    static FAMILY: std::sync::OnceLock<FormFamily> = std::sync::OnceLock::new();
    FAMILY.get_or_init(FormFamily::derive)
}

/// (−1)^k (h⁻¹u₁h⁻¹⋯u_{k−1}h⁻¹)^{pq} ∂_p∂_q u_k written out directly.
pub fn closed_form_p(k: usize) -> FormalTensorPoly {
    assert!((2..=4).contains(&k));
    let mut n = Names::new();
    let mut factors = Vec::new();
    let p = n.fresh();
    let mut cur = p;
    for _ in 0..k - 1 {
        let (x, y) = (n.fresh(), n.fresh());
        factors.push(RawFactor::Up(cur, x));
        factors.push(u(x, y));
        cur = y;
    }
    let q = n.fresh();
    factors.push(RawFactor::Up(cur, q));
    factors.push(du(MU, NU, &[p, q]));
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    canonicalize(RawExpr::single(int(sign), factors), munu(), k).unwrap()
}

/// 2h^{ab}h_{ps}h^{pλ}𝒢_{λμb}h^{sγ}𝒢_{γνa}
///   + h_{νl}h^{lλ}𝒢_{λab}h^{aq}h^{bd}∂_μu_{qd} + h_{μl}h^{lγ}𝒢_{γab}h^{aq}h^{bd}∂_νu_{qd}.
pub fn closed_form_h2() -> FormalTensorPoly {
    let mut n = Names::new();
    let up = |a, b| RawExpr::single(Rational::one(), vec![RawFactor::Up(a, b)]);
    let down = |a, b| RawExpr::single(Rational::one(), vec![RawFactor::Down(a, b)]);
    let (a, b, p, s, l, gm) = (n.fresh(), n.fresh(), n.fresh(), n.fresh(), n.fresh(), n.fresh());
    let first = RawExpr::product(
        &[
            up(a, b),
            down(p, s),
            up(p, l),
            cal_g(l, MU, b),
            up(s, gm),
            cal_g(gm, NU, a),
        ],
        2,
    )
    .scale(&int(2));
    let mut second = |x: Idx, y: Idx| {
        let (l, lam, a, q, b, d) = (n.fresh(), n.fresh(), n.fresh(), n.fresh(), n.fresh(), n.fresh());
        RawExpr::product(
            &[
                down(y, l),
                up(l, lam),
                cal_g(lam, a, b),
                up(a, q),
                up(b, d),
                RawExpr::single(Rational::one(), vec![du(q, d, &[x])]),
            ],
            2,
        )
    };
    let s1 = second(MU, NU);
    let s2 = second(NU, MU);
    canonicalize(RawExpr::sum(vec![first, s1, s2]), munu(), 2).unwrap()
}

// ---------------------------------------------------------------------------
// Evaluation on symbol data.

/// Value of a form on symbol data: `matrix` times i^{i_power}.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValue {
    pub matrix: [[RhoRational; 4]; 4],
    pub i_power: u32,
}

impl FormValue {
    /// ½(M + Mᵀ).
    pub fn symmetric_part(&self) -> Sym2T {
        Sym2T::symmetrize(&self.matrix)
    }
}

fn poly_lcm(a: &Poly, b: &Poly) -> Poly {
    if a.is_one() {
        return b.clone();
    }
    let g = Poly::gcd(a, b);
    a.mul(&b.div_rem(&g).0)
}

fn to_poly_over(x: &RhoRational, d: &Poly) -> Poly {
    x.numer().mul(&d.div_rem(x.denom()).0)
}

/// Substitutes each slot's (matrix, covector) and contracts. Runs over
/// polynomials with one common denominator when the derivative profile allows it.
pub fn symbol_of_form(
    form: &FormalTensorPoly,
    assignment: &[(Sym2T, CoVec4)],
    metric: &Metric4,
) -> Result<FormValue, FormError> {
    if form.free.len() != 2 || form.free.iter().any(|f| f.upper) {
        return Err(FormError::NotTwoTensor(form.free.len()));
    }
    if assignment.len() != form.arity {
        return Err(FormError::MissingSlot {
            expected: form.arity,
            got: assignment.len(),
        });
    }
    let i_power = form
        .monomials
        .first()
        .map_or(0, |m| m.skeleton.derivative_count() as u32);
    let flat = match (form.derivative_profile(), metric_denominator(metric)) {
        (Some(profile), Some(gden)) if !form.monomials.is_empty() => {
            let mut total_den = Poly::one();
            let mut slots = Vec::with_capacity(assignment.len());
            for ((m, xi), nd) in assignment.iter().zip(&profile) {
                let d = m
                    .matrix()
                    .iter()
                    .flatten()
                    .chain(xi.components())
                    .fold(Poly::one(), |acc, x| poly_lcm(&acc, x.denom()));
                total_den = total_den.mul(&d.pow(1 + *nd as u32));
                slots.push(SlotData {
                    matrix: std::array::from_fn(|i| std::array::from_fn(|j| to_poly_over(m.get(i, j), &d))),
                    covector: std::array::from_fn(|i| to_poly_over(&xi[i], &d)),
                });
            }
            let links = form.monomials[0].skeleton.link_count() as u32;
            total_den = total_den.mul(&gden.pow(links));
            let g: [[Poly; 4]; 4] =
                std::array::from_fn(|i| std::array::from_fn(|j| to_poly_over(&metric.upper()[i][j], &gden)));
            let raw = form.contract(&slots, &g)?;
            raw.into_iter()
                .map(|p| RhoRational::from_parts(p, total_den.clone()).expect("denominator is nonzero"))
                .collect::<Vec<_>>()
        }
        _ => {
            let slots: Vec<SlotData<RhoRational>> = assignment
                .iter()
                .map(|(m, xi)| SlotData {
                    matrix: m.matrix().clone(),
                    covector: xi.components().clone(),
                })
                .collect();
            form.contract(&slots, metric.upper())?
        }
    };
    let mut it = flat.into_iter();
    let matrix = std::array::from_fn(|_| std::array::from_fn(|_| it.next().unwrap()));
    Ok(FormValue { matrix, i_power })
}

fn metric_denominator(m: &Metric4) -> Option<Poly> {
    Some(
        m.upper()
            .iter()
            .flatten()
            .fold(Poly::one(), |acc, x| poly_lcm(&acc, x.denom())),
    )
}

/// Overall factor between a form evaluated with λ²h and with h; None unless
/// every nonzero entry scales by the same power of λ.
pub fn scaling_exponent(
    form: &FormalTensorPoly,
    assignment: &[(Sym2T, CoVec4)],
    lambda: &Rational,
) -> Result<Option<i64>, FormError> {
    let h = Metric4::minkowski();
    let scaled = h
        .conformal(&RhoRational::constant(lambda.clone()))
        .expect("λ is nonzero");
    let base = symbol_of_form(form, assignment, &h)?;
    let other = symbol_of_form(form, assignment, &scaled)?;
    let mut ratio: Option<RhoRational> = None;
    for i in 0..4 {
        for j in 0..4 {
            let (a, b) = (&base.matrix[i][j], &other.matrix[i][j]);
            if a.is_zero() != b.is_zero() {
                return Ok(None);
            }
            if a.is_zero() {
                continue;
            }
            let r = b / a;
            match &ratio {
                None => ratio = Some(r),
                Some(q) if *q == r => {}
                Some(_) => return Ok(None),
            }
        }
    }
    let Some(r) = ratio.and_then(|r| r.as_constant()) else {
        return Ok(None);
    };
    Ok(power_of(&r, lambda))
}

/// The integer w with base^w = x, if any.
pub fn power_of(x: &Rational, base: &Rational) -> Option<i64> {
    if x.is_zero() || base.is_zero() || num_traits::Signed::abs(base) == Rational::one() {
        return None;
    }
    for w in -64i64..=64 {
        let candidate = if w >= 0 {
            num_traits::pow(base.clone(), w as usize)
        } else {
            Rational::one() / num_traits::pow(base.clone(), (-w) as usize)
        };
        if &candidate == x {
            return Some(w);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::null_geometry::standard_config;
    use crate::tensor::{pairing, sandwich, sym_outer};

    fn leaf(c: &crate::null_geometry::NullConfig, i: usize) -> (Sym2T, CoVec4) {
        (Sym2T::outer_square(c.zeta(i)), c.zeta(i).clone())
    }

    #[test]
    fn series_low_orders() {
        let s = metric_inverse_series(2);
        assert_eq!(s[0].to_string(), "1 h^{ab}");
        assert_eq!(s[1].monomials.len(), 1);
        assert_eq!(s[1].monomials[0].coeff, int(-1));
        assert_eq!(s[2].monomials[0].coeff, int(1));
    }

    #[test]
    fn quasilinear_parts_match_closed_forms() {
        for k in 2..=4 {
            let fam = reduced_ricci_expansion(k);
            assert_eq!(fam.quasilinear.scale(&int(2)), closed_form_p(k), "P{}", k);
            assert_eq!(fam.discarded, 0);
        }
    }

    #[test]
    fn h2_matches_explicit_formula() {
        let fam = reduced_ricci_expansion(2);
        assert_eq!(fam.semilinear.scale(&int(2)), closed_form_h2());
    }

    #[test]
    fn wave_part() {
        let r = reduced_ricci_expansion(1);
        assert!(r.semilinear.is_zero());
        assert_eq!(r.quasilinear.monomials.len(), 1);
        assert_eq!(r.quasilinear.monomials[0].coeff, rat(-1, 2));
    }

    #[test]
    fn c_ij_identity() {
        let c = standard_config();
        let fam = FormFamily::derive();
        let h2 = fam.get(FormKey::h(2));
        for i in 1..=4 {
            for j in 1..=4 {
                if i == j {
                    continue;
                }
                let b_ij = symbol_of_form(h2, &[leaf(&c, i), leaf(&c, j)], c.metric()).unwrap();
                let b_ji = symbol_of_form(h2, &[leaf(&c, j), leaf(&c, i)], c.metric()).unwrap();
                let sum: [[RhoRational; 4]; 4] =
                    std::array::from_fn(|a| std::array::from_fn(|b| &b_ij.matrix[a][b] + &b_ji.matrix[a][b]));
                let hp = pairing(c.metric(), c.zeta(i), c.zeta(j));
                let expect = sym_outer(c.zeta(i), c.zeta(j))
                    .scale(&(&hp * &hp))
                    .scale_rational(&rat(3, 2));
                assert_eq!(&Sym2T::from_matrix(sum).unwrap(), &expect);
                assert_eq!(b_ij.i_power, 2);
            }
        }
    }

    #[test]
    fn p2_rank_one() {
        let c = standard_config();
        let fam = FormFamily::derive();
        let v = symbol_of_form(fam.get(FormKey::p(2)), &[leaf(&c, 3), leaf(&c, 4)], c.metric()).unwrap();
        let s = sandwich(c.metric(), &Sym2T::outer_square(c.zeta(3)), c.zeta(4));
        assert_eq!(v.symmetric_part(), Sym2T::outer_square(c.zeta(4)).scale(&s));
    }

    #[test]
    fn christoffel_rank_three() {
        let g = christoffel_form();
        let z = CoVec4::from_ints([1, 0, 1, 0]);
        let slots = [SlotData {
            matrix: std::array::from_fn(|i| std::array::from_fn(|j| z[i].clone() * z[j].clone())),
            covector: z.components().clone(),
        }];
        let h = Metric4::minkowski();
        let out = g.contract(&slots, h.upper()).unwrap();
        for l in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    let v = &out[16 * l + 4 * a + b];
                    assert_eq!(v, &(&(&z[l] * &z[a]) * &z[b]).scale(&rat(1, 2)));
                    assert_eq!(v, &out[16 * l + 4 * b + a]);
                }
            }
        }
    }
}
