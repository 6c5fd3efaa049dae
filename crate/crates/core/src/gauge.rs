//! Symbol-level gauge and conservation constraints, and the dimensions of
//! their solution spaces.

use crate::algebra::{rat, Poly, RhoRational};
use crate::tensor::{CoVec4, Metric4, Sym2T};
use std::array;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaugeError {
    #[error("expected one gradient per scalar field, got {fields} fields and {gradients} gradients")]
    LengthMismatch { fields: usize, gradients: usize },
    #[error("at least one scalar field is required")]
    NoScalarFields,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    HarmonicGauge,
    ConservationLaw,
    ScalarConservation,
    MaxwellConservation,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 4] = [
        ConstraintKind::HarmonicGauge,
        ConstraintKind::ConservationLaw,
        ConstraintKind::ScalarConservation,
        ConstraintKind::MaxwellConservation,
    ];

    pub fn fiber_dim(self) -> usize {
        match self {
            ConstraintKind::MaxwellConservation => 4,
            _ => 10,
        }
    }
}

/// −m^{αβ} ξ_α A_{βμ} + ½ m^{αβ} ξ_μ A_{αβ}.
pub fn harmonic_gauge_residual(m: &Metric4, xi: &CoVec4, a: &Sym2T) -> CoVec4 {
    let up = m.raise(xi);
    let g = m.upper();
    let mut trace = RhoRational::zero();
    for al in 0..4 {
        for be in 0..4 {
            if !g[al][be].is_zero() && !a.get(al, be).is_zero() {
                trace = trace + &g[al][be] * a.get(al, be);
            }
        }
    }
    let half_trace = trace.scale(&rat(1, 2));
    CoVec4::new(array::from_fn(|mu| {
        let contracted = (0..4).fold(RhoRational::zero(), |acc, b| acc + &up[b] * a.get(b, mu));
        &(&xi[mu] * &half_trace) - &contracted
    }))
}

/// m^{pk} η_p A_{kj}.
pub fn conservation_residual(m: &Metric4, eta: &CoVec4, a: &Sym2T) -> CoVec4 {
    let up = m.raise(eta);
    CoVec4::new(array::from_fn(|j| {
        (0..4).fold(RhoRational::zero(), |acc, k| acc + &up[k] * a.get(k, j))
    }))
}

/// ½ m^{pk} η_p A_{kj} + Σ_l B_l (∇φ_l)_j.
pub fn scalar_conservation_residual(
    m: &Metric4,
    eta: &CoVec4,
    a: &Sym2T,
    b: &[RhoRational],
    phi_gradients: &[CoVec4],
) -> Result<CoVec4, GaugeError> {
    if b.is_empty() {
        return Err(GaugeError::NoScalarFields);
    }
    if b.len() != phi_gradients.len() {
        return Err(GaugeError::LengthMismatch {
            fields: b.len(),
            gradients: phi_gradients.len(),
        });
    }
    let base = conservation_residual(m, eta, a).scale_rational(&rat(1, 2));
    Ok(b.iter()
        .zip(phi_gradients)
        .fold(base, |acc, (bl, grad)| &acc + &grad.scale(bl)))
}

/// Σ_α η_α B_α, the Euclidean contraction of the flat-model symbol statement.
pub fn maxwell_conservation_residual(eta: &CoVec4, b: &CoVec4) -> RhoRational {
    (0..4).fold(RhoRational::zero(), |acc, k| acc + &eta[k] * &b[k])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceDim {
    pub dim: usize,
    pub degenerate: bool,
}

/// Basis of the symmetric fiber: e_a⊗e_a, then e_a⊗e_b + e_b⊗e_a for a < b.
pub fn sym2_basis() -> Vec<Sym2T> {
    let mut out = Vec::with_capacity(10);
    for a in 0..4 {
        for b in a..4 {
            let mut m = crate::tensor::zero_mat();
            m[a][b] = RhoRational::one();
            m[b][a] = RhoRational::one();
            out.push(Sym2T::from_matrix(m).unwrap());
        }
    }
    out
}

/// Dimension of the kernel of the constraint on its fiber.
///
/// The scalar-field law differs from the conservation law on the metric fiber by
/// a factor ½ and an affine source term, so it shares the homogeneous kernel.
pub fn constraint_space_dim(kind: ConstraintKind, m: &Metric4, covector: &CoVec4) -> SpaceDim {
    if covector.is_zero() {
        return SpaceDim {
            dim: kind.fiber_dim(),
            degenerate: true,
        };
    }
    let columns: Vec<Vec<RhoRational>> = match kind {
        ConstraintKind::MaxwellConservation => (0..4)
            .map(|k| vec![maxwell_conservation_residual(covector, &CoVec4::basis(k))])
            .collect(),
        _ => sym2_basis()
            .iter()
            .map(|e| {
                let r = match kind {
                    ConstraintKind::HarmonicGauge => harmonic_gauge_residual(m, covector, e),
                    ConstraintKind::ScalarConservation => {
                        conservation_residual(m, covector, e).scale_rational(&rat(1, 2))
                    }
                    _ => conservation_residual(m, covector, e),
                };
                r.components().to_vec()
            })
            .collect(),
    };
    let rows: Vec<Vec<RhoRational>> = (0..columns[0].len())
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    SpaceDim {
        dim: kind.fiber_dim() - rank_fraction_free(&rows),
        degenerate: false,
    }
}

/// Rank over Q(ρ) by Bareiss elimination on denominator-cleared polynomial rows.
pub fn rank_fraction_free(rows: &[Vec<RhoRational>]) -> usize {
    let mut a: Vec<Vec<Poly>> = rows
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(Poly::one(), |l, x| {
                let g = Poly::gcd(&l, x.denom());
                l.mul(&x.denom().div_rem(&g).0)
            });
            row.iter().map(|x| x.numer().mul(&lcm.div_rem(x.denom()).0)).collect()
        })
        .collect();
    let n_rows = a.len();
    let n_cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = Poly::one();
    for col in 0..n_cols {
        let Some(p) = (rank..n_rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in (rank + 1)..n_rows {
            for c in (col + 1)..n_cols {
                let num = a[rank][col].mul(&a[r][c]).sub(&a[r][col].mul(&a[rank][c]));
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[r][c] = q;
            }
            a[r][col] = Poly::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == n_rows {
            break;
        }
    }
    rank
}

/// Light-like covector from a Pythagorean quadruple built on (m, n, p, q):
/// (±(m²+n²+p²+q²), 2(mq+np), 2(nq−mp), m²+n²−p²−q²), scaled by `scale`.
pub fn light_like_from_params(m: i64, n: i64, p: i64, q: i64, future: bool, scale: &RhoRational) -> CoVec4 {
    let d = m * m + n * n + p * p + q * q;
    let t = if future { d } else { -d };
    CoVec4::new([
        RhoRational::integer(t),
        RhoRational::integer(2 * (m * q + n * p)),
        RhoRational::integer(2 * (n * q - m * p)),
        RhoRational::integer(m * m + n * n - p * p - q * q),
    ])
    .scale(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::null_geometry::standard_config;

    #[test]
    fn rank_one_polarizations_satisfy_both_constraints() {
        let c = standard_config();
        let h = c.metric();
        for z in c.zetas() {
            let a = Sym2T::outer_square(z);
            assert!(harmonic_gauge_residual(h, z, &a).is_zero());
            assert!(conservation_residual(h, z, &a).is_zero());
        }
    }

    #[test]
    fn identity_violates_gauge() {
        let h = Metric4::minkowski();
        let z1 = CoVec4::from_ints([1, 0, 1, 0]);
        let r = harmonic_gauge_residual(&h, &z1, &Sym2T::identity());
        assert_eq!(r[0], RhoRational::integer(2));
        assert!(!r.is_zero());
        assert!(harmonic_gauge_residual(&h, &z1, &Sym2T::zero()).is_zero());
    }

    #[test]
    fn conservation_against_other_wave() {
        let c = standard_config();
        let r = conservation_residual(c.metric(), c.zeta(1), &Sym2T::outer_square(c.zeta(2)));
        assert_eq!(&r, c.zeta(2));
    }

    #[test]
    fn scalar_law_cancels_with_half_source() {
        let c = standard_config();
        let a = Sym2T::outer_square(c.zeta(2));
        let b = [RhoRational::constant(rat(-1, 2))];
        let r = scalar_conservation_residual(c.metric(), c.zeta(1), &a, &b, &[c.zeta(2).clone()]).unwrap();
        assert!(r.is_zero());
        let r = scalar_conservation_residual(
            c.metric(),
            c.zeta(1),
            &Sym2T::zero(),
            &[RhoRational::one()],
            &[CoVec4::basis(0)],
        )
        .unwrap();
        assert_eq!(r, CoVec4::basis(0));
        assert_eq!(
            scalar_conservation_residual(c.metric(), c.zeta(1), &a, &b, &[]),
            Err(GaugeError::LengthMismatch {
                fields: 1,
                gradients: 0
            })
        );
    }

    #[test]
    fn maxwell_examples() {
        let c = standard_config();
        assert_eq!(
            maxwell_conservation_residual(c.zeta(1), c.zeta(2)),
            RhoRational::integer(-1)
        );
        assert!(maxwell_conservation_residual(c.zeta(1), &CoVec4::zero()).is_zero());
    }

    #[test]
    fn dimensions() {
        let c = standard_config();
        let h = c.metric();
        for z in c.zetas() {
            assert_eq!(constraint_space_dim(ConstraintKind::ConservationLaw, h, z).dim, 6);
            assert_eq!(constraint_space_dim(ConstraintKind::HarmonicGauge, h, z).dim, 6);
            assert_eq!(constraint_space_dim(ConstraintKind::MaxwellConservation, h, z).dim, 3);
        }
        let zero = constraint_space_dim(ConstraintKind::ConservationLaw, h, &CoVec4::zero());
        assert_eq!(
            zero,
            SpaceDim {
                dim: 10,
                degenerate: true
            }
        );
    }

    #[test]
    fn quadruples_are_null() {
        let h = Metric4::minkowski();
        let v = light_like_from_params(1, 2, 3, 4, true, &RhoRational::rho_pow(10));
        assert!(crate::tensor::norm_sq(&h, &v).is_zero());
    }
}
