//! Covectors, symmetric two-tensors and constant background metrics in
//! dimension four over Q(ρ). Indices are concrete, 0..3.

use crate::algebra::{Rational, RhoRational};
use std::array;
use std::fmt;
use std::ops::{Add, Index, Neg, Sub};
use thiserror::Error;

pub type Mat4 = [[RhoRational; 4]; 4];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("metric is not symmetric at ({0}, {1})")]
    AsymmetricMetric(usize, usize),
    #[error("metric is singular")]
    SingularMetric,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
}

pub fn zero_mat() -> Mat4 {
    array::from_fn(|_| array::from_fn(|_| RhoRational::zero()))
}

pub fn identity_mat() -> Mat4 {
    array::from_fn(|i| array::from_fn(|j| RhoRational::integer((i == j) as i64)))
}

fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    array::from_fn(|i| {
        array::from_fn(|j| {
            (0..4).fold(RhoRational::zero(), |acc, k| {
                if a[i][k].is_zero() || b[k][j].is_zero() {
                    acc
                } else {
                    acc + &a[i][k] * &b[k][j]
                }
            })
        })
    })
}

fn invert(g: &Mat4) -> Result<Mat4, TensorError> {
    let mut a = g.clone();
    let mut inv = identity_mat();
    for col in 0..4 {
        let pivot = (col..4)
            .find(|&r| !a[r][col].is_zero())
            .ok_or(TensorError::SingularMetric)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].inv().map_err(|_| TensorError::SingularMetric)?;
        for j in 0..4 {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..4 {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..4 {
                a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Ok(inv)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CoVec4(pub [RhoRational; 4]);

impl CoVec4 {
    pub fn new(c: [RhoRational; 4]) -> Self {
        CoVec4(c)
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        CoVec4(c.map(RhoRational::integer))
    }

    pub fn zero() -> Self {
        CoVec4::default()
    }

    pub fn basis(i: usize) -> Self {
        CoVec4(array::from_fn(|k| RhoRational::integer((k == i) as i64)))
    }

    pub fn scale(&self, s: &RhoRational) -> Self {
        CoVec4(array::from_fn(|k| &self.0[k] * s))
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        CoVec4(array::from_fn(|k| self.0[k].scale(s)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(RhoRational::is_zero)
    }

    pub fn components(&self) -> &[RhoRational; 4] {
        &self.0
    }

    pub fn eval_f64(&self, rho: f64) -> [f64; 4] {
        array::from_fn(|k| self.0[k].eval_f64(rho))
    }

    pub fn eval_rational(&self, rho: &Rational) -> [Rational; 4] {
        array::from_fn(|k| self.0[k].eval_rational(rho).expect("covector component has a pole"))
    }
}

impl Index<usize> for CoVec4 {
    type Output = RhoRational;
    fn index(&self, i: usize) -> &RhoRational {
        &self.0[i]
    }
}

impl<'a> Add<&'a CoVec4> for &'a CoVec4 {
    type Output = CoVec4;
    fn add(self, o: &'a CoVec4) -> CoVec4 {
        CoVec4(array::from_fn(|k| &self.0[k] + &o.0[k]))
    }
}

impl<'a> Sub<&'a CoVec4> for &'a CoVec4 {
    type Output = CoVec4;
    fn sub(self, o: &'a CoVec4) -> CoVec4 {
        CoVec4(array::from_fn(|k| &self.0[k] - &o.0[k]))
    }
}

impl Neg for &CoVec4 {
    type Output = CoVec4;
    fn neg(self) -> CoVec4 {
        CoVec4(array::from_fn(|k| -&self.0[k]))
    }
}

impl<'a> std::iter::Sum<&'a CoVec4> for CoVec4 {
    fn sum<I: Iterator<Item = &'a CoVec4>>(iter: I) -> CoVec4 {
        iter.fold(CoVec4::zero(), |acc, v| &acc + v)
    }
}

impl fmt::Display for CoVec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl fmt::Debug for CoVec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Symmetric 4×4 matrix over Q(ρ).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sym2T(Mat4);

impl Sym2T {
    pub fn zero() -> Self {
        Sym2T(zero_mat())
    }

    pub fn from_matrix(m: Mat4) -> Result<Self, TensorError> {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if m[i][j] != m[j][i] {
                    return Err(TensorError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Sym2T(m))
    }

    pub fn from_ints(m: [[i64; 4]; 4]) -> Result<Self, TensorError> {
        Self::from_matrix(m.map(|row| row.map(RhoRational::integer)))
    }

    /// ½(M + Mᵀ).
    pub fn symmetrize(m: &Mat4) -> Self {
        let half = Rational::new(1.into(), 2.into());
        Sym2T(array::from_fn(|i| {
            array::from_fn(|j| {
                if i == j {
                    m[i][i].clone()
                } else {
                    (&m[i][j] + &m[j][i]).scale(&half)
                }
            })
        }))
    }

    /// ζ ⊗ ζ.
    pub fn outer_square(a: &CoVec4) -> Self {
        Sym2T(array::from_fn(|i| array::from_fn(|j| &a[i] * &a[j])))
    }

    pub fn identity() -> Self {
        Sym2T(identity_mat())
    }

    pub fn get(&self, i: usize, j: usize) -> &RhoRational {
        &self.0[i][j]
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn scale(&self, s: &RhoRational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Sym2T(array::from_fn(|i| array::from_fn(|j| &self.0[i][j] * s)))
    }

    pub fn scale_rational(&self, s: &Rational) -> Self {
        Sym2T(array::from_fn(|i| array::from_fn(|j| self.0[i][j].scale(s))))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(RhoRational::is_zero)
    }

    /// Maximum over entries of the degree at infinity; `None` for the zero matrix.
    pub fn entry_order(&self) -> Option<i64> {
        self.0.iter().flatten().filter_map(RhoRational::infinity_degree).max()
    }

    /// Entries' coefficients at ρ^order (zero where an entry is of lower order).
    pub fn coefficients_at(&self, order: i64) -> [[Rational; 4]; 4] {
        array::from_fn(|i| {
            array::from_fn(|j| {
                let e = &self.0[i][j];
                if e.infinity_degree() == Some(order) {
                    e.leading_coefficient()
                } else {
                    Rational::from_integer(0.into())
                }
            })
        })
    }

    pub fn eval_f64(&self, rho: f64) -> [[f64; 4]; 4] {
        array::from_fn(|i| array::from_fn(|j| self.0[i][j].eval_f64(rho)))
    }

    pub fn eval_rational(&self, rho: &Rational) -> [[Rational; 4]; 4] {
        array::from_fn(|i| array::from_fn(|j| self.0[i][j].eval_rational(rho).expect("entry has a pole")))
    }
}

impl<'a> Add<&'a Sym2T> for &'a Sym2T {
    type Output = Sym2T;
    fn add(self, o: &'a Sym2T) -> Sym2T {
        Sym2T(array::from_fn(|i| array::from_fn(|j| &self.0[i][j] + &o.0[i][j])))
    }
}

impl<'a> Sub<&'a Sym2T> for &'a Sym2T {
    type Output = Sym2T;
    fn sub(self, o: &'a Sym2T) -> Sym2T {
        Sym2T(array::from_fn(|i| array::from_fn(|j| &self.0[i][j] - &o.0[i][j])))
    }
}

impl Neg for &Sym2T {
    type Output = Sym2T;
    fn neg(self) -> Sym2T {
        Sym2T(array::from_fn(|i| array::from_fn(|j| -&self.0[i][j])))
    }
}

impl<'a> std::iter::Sum<&'a Sym2T> for Sym2T {
    fn sum<I: Iterator<Item = &'a Sym2T>>(iter: I) -> Sym2T {
        iter.fold(Sym2T::zero(), |acc, v| &acc + v)
    }
}

impl fmt::Display for Sym2T {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .0
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for (k, row) in cells.iter().enumerate() {
            let line: Vec<String> = row.iter().map(|c| format!("{:>w$}", c, w = width)).collect();
            write!(f, "[ {} ]", line.join("  "))?;
            if k < 3 {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Sym2T {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .0
            .iter()
            .map(|r| r.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Constant symmetric nondegenerate background metric with its exact inverse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Metric4 {
    lower: Mat4,
    upper: Mat4,
}

impl Default for Metric4 {
    fn default() -> Self {
        Self::minkowski()
    }
}

impl Metric4 {
    /// h = diag(−1, 1, 1, 1).
    pub fn minkowski() -> Self {
        let h: Mat4 = array::from_fn(|i| {
            array::from_fn(|j| {
                RhoRational::integer(if i != j {
                    0
                } else if i == 0 {
                    -1
                } else {
                    1
                })
            })
        });
        Metric4 {
            lower: h.clone(),
            upper: h,
        }
    }

    pub fn new(lower: Mat4) -> Result<Self, TensorError> {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if lower[i][j] != lower[j][i] {
                    return Err(TensorError::AsymmetricMetric(i, j));
                }
            }
        }
        let upper = invert(&lower)?;
        Ok(Metric4 { lower, upper })
    }

    /// λ²·self.
    pub fn conformal(&self, lambda: &RhoRational) -> Result<Self, TensorError> {
        let l2 = lambda * lambda;
        if l2.is_zero() {
            return Err(TensorError::SingularMetric);
        }
        let il2 = l2.inv().map_err(|_| TensorError::SingularMetric)?;
        Ok(Metric4 {
            lower: array::from_fn(|i| array::from_fn(|j| &self.lower[i][j] * &l2)),
            upper: array::from_fn(|i| array::from_fn(|j| &self.upper[i][j] * &il2)),
        })
    }

    pub fn lower(&self) -> &Mat4 {
        &self.lower
    }

    pub fn upper(&self) -> &Mat4 {
        &self.upper
    }

    pub fn inverse_is_exact(&self) -> bool {
        mat_mul(&self.lower, &self.upper) == identity_mat()
    }

    /// m^{αβ} ξ_β.
    pub fn raise(&self, xi: &CoVec4) -> [RhoRational; 4] {
        array::from_fn(|a| {
            (0..4).fold(RhoRational::zero(), |acc, b| {
                if self.upper[a][b].is_zero() || xi[b].is_zero() {
                    acc
                } else {
                    acc + &self.upper[a][b] * &xi[b]
                }
            })
        })
    }

    /// m^{αβ} S_{βγ} m^{γδ}.
    pub fn raise_both(&self, s: &Sym2T) -> Mat4 {
        mat_mul(&mat_mul(&self.upper, s.matrix()), &self.upper)
    }
}

fn dot(a: &[RhoRational; 4], b: &CoVec4) -> RhoRational {
    (0..4).fold(RhoRational::zero(), |acc, k| {
        if a[k].is_zero() || b[k].is_zero() {
            acc
        } else {
            acc + &a[k] * &b[k]
        }
    })
}

/// m^{αβ} ζ_α η_β.
pub fn pairing(m: &Metric4, zeta: &CoVec4, eta: &CoVec4) -> RhoRational {
    dot(&m.raise(zeta), eta)
}

pub fn norm_sq(m: &Metric4, zeta: &CoVec4) -> RhoRational {
    pairing(m, zeta, zeta)
}

/// (m⁻¹ S m⁻¹)^{pq} ξ_p ξ_q.
pub fn sandwich(m: &Metric4, s: &Sym2T, xi: &CoVec4) -> RhoRational {
    let up = m.raise(xi);
    let mut acc = RhoRational::zero();
    for p in 0..4 {
        for q in 0..4 {
            let e = s.get(p, q);
            if !e.is_zero() && !up[p].is_zero() && !up[q].is_zero() {
                acc = acc + &(&up[p] * e) * &up[q];
            }
        }
    }
    acc
}

/// (m⁻¹ S₁ m⁻¹ S₂ m⁻¹)^{pq} ξ_p ξ_q.
pub fn double_sandwich(m: &Metric4, s1: &Sym2T, s2: &Sym2T, xi: &CoVec4) -> RhoRational {
    let up = m.raise(xi);
    let left: [RhoRational; 4] =
        array::from_fn(|b| (0..4).fold(RhoRational::zero(), |acc, a| acc + &up[a] * s1.get(a, b)));
    let right: [RhoRational; 4] =
        array::from_fn(|c| (0..4).fold(RhoRational::zero(), |acc, d| acc + s2.get(c, d) * &up[d]));
    let mut acc = RhoRational::zero();
    for b in 0..4 {
        for c in 0..4 {
            let g = &m.upper()[b][c];
            if !g.is_zero() && !left[b].is_zero() && !right[c].is_zero() {
                acc = acc + &(&left[b] * g) * &right[c];
            }
        }
    }
    acc
}

/// a_μ b_ν + a_ν b_μ.
pub fn sym_outer(a: &CoVec4, b: &CoVec4) -> Sym2T {
    Sym2T(array::from_fn(|i| {
        array::from_fn(|j| &(&a[i] * &b[j]) + &(&a[j] * &b[i]))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minkowski_inverse_is_exact() {
        assert!(Metric4::minkowski().inverse_is_exact());
        let g = Metric4::new(
            Sym2T::from_ints([[-2, 1, 0, 0], [1, 3, 0, 0], [0, 0, 1, 0], [0, 0, 0, 5]])
                .unwrap()
                .matrix()
                .clone(),
        )
        .unwrap();
        assert!(g.inverse_is_exact());
    }

    #[test]
    fn singular_metric_rejected() {
        let m = Sym2T::from_ints([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]).unwrap();
        assert_eq!(Metric4::new(m.matrix().clone()), Err(TensorError::SingularMetric));
    }

    #[test]
    fn sym_outer_of_basis_vectors() {
        let s = sym_outer(&CoVec4::basis(0), &CoVec4::basis(1));
        let expect = Sym2T::from_ints([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]).unwrap();
        assert_eq!(s, expect);
        let z = CoVec4::from_ints([1, 0, 1, 0]);
        assert_eq!(
            sym_outer(&z, &z),
            Sym2T::outer_square(&z).scale(&RhoRational::integer(2))
        );
    }

    #[test]
    fn sandwich_of_zero_is_zero() {
        let h = Metric4::minkowski();
        assert!(sandwich(&h, &Sym2T::zero(), &CoVec4::from_ints([3, 1, 4, 1])).is_zero());
    }

    #[test]
    fn asymmetric_input_rejected() {
        let mut m = zero_mat();
        m[0][1] = RhoRational::integer(1);
        assert_eq!(Sym2T::from_matrix(m), Err(TensorError::NotSymmetric(0, 1)));
    }
}
