//! Floating-point evaluation of interaction terms from the explicit P and Ĥ
//! formulas, sharing nothing with the symbolic form machinery.

use super::ast::{SignedTerm, TermAst};
use super::eval::i_factor_sign;
use crate::algebra::rational::to_f64;
use crate::null_geometry::NullConfig;
use crate::ricci::FormKind;
use crate::tensor::Sym2T;

type M4 = [[f64; 4]; 4];
type V4 = [f64; 4];

pub const RELATIVE_TOLERANCE: f64 = 1e-9;

pub struct NumericOracle {
    g: M4,
    zetas: [V4; 4],
    leaves: [M4; 4],
}

fn mat_mul(a: &M4, b: &M4) -> M4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

fn scale(a: &M4, s: f64) -> M4 {
    a.map(|r| r.map(|x| x * s))
}

fn add(a: &M4, b: &M4) -> M4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

/// One evaluation pass; `abs` runs the same formulas on absolute values, giving
/// per-entry sums of |products| as the scale of the rounding error.
struct Kernel {
    g: M4,
    abs: bool,
}

impl Kernel {
    fn sign(&self, x: f64) -> f64 {
        if self.abs {
            x.abs()
        } else {
            x
        }
    }

    /// (-1)^n g M₁ g M₂ ⋯ g: the order-n term of the inverse metric series.
    fn neumann(&self, ms: &[M4]) -> M4 {
        let mut r = self.g;
        for m in ms {
            r = mat_mul(&mat_mul(&r, m), &self.g);
        }
        scale(&r, self.sign(if ms.len() % 2 == 1 { -1.0 } else { 1.0 }))
    }

    /// ½(ξ_b M_{la} + ξ_a M_{lb} − ξ_l M_{ab}) as [l][a][b].
    fn christoffel(&self, m: &M4, xi: &V4) -> [[[f64; 4]; 4]; 4] {
        std::array::from_fn(|l| {
            std::array::from_fn(|a| {
                std::array::from_fn(|b| 0.5 * (xi[b] * m[l][a] + xi[a] * m[l][b] + self.sign(-1.0) * xi[l] * m[a][b]))
            })
        })
    }

    fn p_form(&self, slots: &[(M4, V4)]) -> M4 {
        let (m, xi) = slots.last().unwrap();
        let rest: Vec<M4> = slots[..slots.len() - 1].iter().map(|s| s.0).collect();
        let c = scale(&self.neumann(&rest), self.sign(-1.0));
        let s: f64 = (0..4)
            .flat_map(|p| (0..4).map(move |q| (p, q)))
            .map(|(p, q)| c[p][q] * xi[p] * xi[q])
            .sum();
        scale(m, s)
    }

    fn h_form(&self, slots: &[(M4, V4)]) -> M4 {
        let n = slots.len();
        let (m1, x1) = &slots[n - 2];
        let (m2, x2) = &slots[n - 1];
        let rest: Vec<M4> = slots[..n - 2].iter().map(|s| s.0).collect();
        let g1 = self.christoffel(m1, x1);
        let g2 = self.christoffel(m2, x2);
        let mut out = [[0.0; 4]; 4];
        for cut in 0..=rest.len() {
            let n1 = self.neumann(&rest[..cut]);
            let n2 = self.neumann(&rest[cut..]);
            for mu in 0..4 {
                for nu in 0..4 {
                    let mut v = 0.0;
                    for a in 0..4 {
                        for b in 0..4 {
                            for l in 0..4 {
                                for c in 0..4 {
                                    v += 2.0 * n1[a][b] * n2[l][c] * g1[l][mu][b] * g2[c][nu][a];
                                    v += n1[a][l]
                                        * n2[b][c]
                                        * m2[l][c]
                                        * (g1[nu][a][b] * x2[mu] + g1[mu][a][b] * x2[nu]);
                                }
                            }
                        }
                    }
                    out[mu][nu] += v;
                }
            }
        }
        std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (out[i][j] + out[j][i])))
    }

    fn form(&self, kind: FormKind, slots: &[(M4, V4)]) -> M4 {
        match kind {
            FormKind::P => self.p_form(slots),
            FormKind::H => self.h_form(slots),
            FormKind::G => add(&self.p_form(slots), &self.h_form(slots)),
        }
    }
}

/// Numeric value of a term with its rounding scale.
#[derive(Clone, Copy, Debug)]
pub struct NumericValue {
    pub matrix: M4,
    pub magnitude: M4,
    pub covector: V4,
}

impl NumericOracle {
    pub fn new(config: &NullConfig, leaves: &[Sym2T; 4], rho: f64) -> Self {
        let g = config
            .metric()
            .upper()
            .each_ref()
            .map(|r| r.each_ref().map(|x| x.eval_f64(rho)));
        NumericOracle {
            g,
            zetas: std::array::from_fn(|i| config.zeta(i + 1).eval_f64(rho)),
            leaves: std::array::from_fn(|i| leaves[i].eval_f64(rho)),
        }
    }

    /// Waves carry ζ⊗ζ.
    pub fn standard(config: &NullConfig, rho: f64) -> Self {
        let leaves = std::array::from_fn(|i| Sym2T::outer_square(config.zeta(i + 1)));
        Self::new(config, &leaves, rho)
    }

    fn pair(&self, a: &V4, b: &V4) -> f64 {
        (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| self.g[i][j] * a[i] * b[j])
            .sum()
    }

    /// Matrix part of the symbol of `ast` (powers of i stripped).
    pub fn eval(&self, ast: &TermAst) -> NumericValue {
        match ast {
            TermAst::Leaf(i) => {
                let m = self.leaves[*i as usize - 1];
                NumericValue {
                    matrix: m,
                    magnitude: m.map(|r| r.map(f64::abs)),
                    covector: self.zetas[*i as usize - 1],
                }
            }
            TermAst::Q(c) => {
                let v = self.eval(c);
                // Summing pairings label by label avoids squaring a sum of
                // covectors of very different sizes.
                let labels = c.leaves();
                let n: f64 = labels
                    .iter()
                    .flat_map(|&i| labels.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| self.pair(&self.zetas[i as usize - 1], &self.zetas[j as usize - 1]))
                    .sum();
                NumericValue {
                    matrix: scale(&v.matrix, 1.0 / n),
                    magnitude: scale(&v.magnitude, 1.0 / n.abs()),
                    ..v
                }
            }
            TermAst::Form(key, cs) => {
                let vals: Vec<NumericValue> = cs.iter().map(|c| self.eval(c)).collect();
                let xi = vals
                    .iter()
                    .fold([0.0; 4], |acc, v| std::array::from_fn(|i| acc[i] + v.covector[i]));
                let plain: Vec<(M4, V4)> = vals.iter().map(|v| (v.matrix, v.covector)).collect();
                let absolute: Vec<(M4, V4)> = vals.iter().map(|v| (v.magnitude, v.covector.map(f64::abs))).collect();
                let signed = Kernel { g: self.g, abs: false };
                let unsigned = Kernel {
                    g: self.g.map(|r| r.map(f64::abs)),
                    abs: true,
                };
                NumericValue {
                    matrix: signed.form(key.kind, &plain),
                    magnitude: unsigned.form(key.kind, &absolute),
                    covector: xi,
                }
            }
        }
    }

    /// sign·i^{2·forms}·matrix, with its magnitude.
    pub fn contribution(&self, t: &SignedTerm) -> (M4, M4) {
        let s = t.sign * i_factor_sign(2 * t.ast.form_count() as u32);
        let v = self.eval(&t.ast);
        (scale(&v.matrix, s as f64), v.magnitude)
    }

    /// Σ contributions together with the summed magnitudes.
    pub fn sum(&self, terms: &[SignedTerm]) -> (M4, M4) {
        let mut total = [[0.0; 4]; 4];
        let mut magnitude = [[0.0; 4]; 4];
        for t in terms {
            let (c, m) = self.contribution(t);
            total = add(&total, &c);
            magnitude = add(&magnitude, &m);
        }
        (total, magnitude)
    }
}

/// Worst entry of |exact − numeric| / max(|exact|, |numeric|, magnitude).
///
/// `magnitude` bounds the sum of |products| behind each entry; rounding error
/// is relative to it, not to the possibly cancelled entry.
pub fn relative_discrepancy(exact: &M4, numeric: &M4, magnitude: &M4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let d = (exact[i][j] - numeric[i][j]).abs();
            if d == 0.0 {
                continue;
            }
            let s = exact[i][j].abs().max(numeric[i][j].abs()).max(magnitude[i][j]);
            worst = worst.max(d / s);
        }
    }
    worst
}

/// Exact matrix evaluated at a rational point and rounded once.
pub fn exact_at(m: &Sym2T, rho: f64) -> M4 {
    let r = crate::algebra::Rational::from_float(rho).expect("ρ is finite");
    m.eval_rational(&r).map(|row| row.map(|x| to_f64(&x)))
}
