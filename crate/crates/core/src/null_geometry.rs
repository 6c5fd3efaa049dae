//! The four light-like covectors of the interaction point and the flat-model
//! causal checks on the points the waves are sent from.

use crate::algebra::{int, rat, Rational, RhoRational};
use crate::tensor::{norm_sq, pairing, CoVec4, Metric4};
use itertools::Itertools;
use num_traits::Zero;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("covector {0} is not light-like: |zeta|^2 = {1}")]
    NotNull(usize, RhoRational),
    #[error("covectors are linearly dependent")]
    Dependent,
    #[error("sum of the covectors is not light-like: |zeta|^2 = {0}")]
    SumNotNull(RhoRational),
    #[error("tilde covector 3 is not light-like, the null condition is not linear in alpha_3")]
    NonlinearCondition,
    #[error("linear coefficient h(c, tilde_zeta_3) vanishes, where c = a1*tz1 + a2*tz2 + a4*tz4")]
    DegenerateScale,
}

/// Four light-like, linearly independent covectors whose sum is light-like.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullConfig {
    zetas: [CoVec4; 4],
    metric: Metric4,
}

impl NullConfig {
    pub fn new(metric: Metric4, zetas: [CoVec4; 4]) -> Result<Self, GeometryError> {
        for (i, z) in zetas.iter().enumerate() {
            let n = norm_sq(&metric, z);
            if !n.is_zero() {
                return Err(GeometryError::NotNull(i + 1, n));
            }
        }
        if determinant(&zetas).is_zero() {
            return Err(GeometryError::Dependent);
        }
        let total: CoVec4 = zetas.iter().sum();
        let n = norm_sq(&metric, &total);
        if !n.is_zero() {
            return Err(GeometryError::SumNotNull(n));
        }
        Ok(NullConfig { zetas, metric })
    }

    /// Wave labels are 1-based.
    pub fn zeta(&self, label: usize) -> &CoVec4 {
        &self.zetas[label - 1]
    }

    pub fn zetas(&self) -> &[CoVec4; 4] {
        &self.zetas
    }

    pub fn metric(&self) -> &Metric4 {
        &self.metric
    }

    pub fn with_metric(&self, metric: Metric4) -> Result<Self, GeometryError> {
        Self::new(metric, self.zetas.clone())
    }

    pub fn pair(&self, i: usize, j: usize) -> RhoRational {
        pairing(&self.metric, self.zeta(i), self.zeta(j))
    }

    pub fn sum_of(&self, labels: &[usize]) -> CoVec4 {
        labels.iter().map(|&l| self.zeta(l)).sum()
    }

    /// h(ζ^(i), ζ^(j)) for i < j.
    pub fn pairing_table(&self) -> Vec<((usize, usize), RhoRational)> {
        (1..=4)
            .tuple_combinations()
            .map(|(i, j)| ((i, j), self.pair(i, j)))
            .collect()
    }

    /// |ζ^(i) + ζ^(j) + ζ^(k)|² for the four triples.
    pub fn triple_sum_norms(&self) -> Vec<([usize; 3], RhoRational)> {
        (1..=4)
            .tuple_combinations()
            .map(|(i, j, k)| ([i, j, k], norm_sq(&self.metric, &self.sum_of(&[i, j, k]))))
            .collect()
    }
}

/// ζ̃^(1..4) before scaling.
pub fn tilde_zetas() -> [CoVec4; 4] {
    [
        CoVec4::from_ints([1, 0, 1, 0]),
        CoVec4::from_ints([1, 0, 0, 1]),
        CoVec4::from_ints([-1, -1, 0, 0]),
        CoVec4::from_ints([1, -1, 0, 0]),
    ]
}

/// ζ^(1) = (1,0,1,0), ζ^(2) = −(1,0,0,1), ζ^(3) = ½ρ^{−10}(1,1,0,0), ζ^(4) = ρ^{10}(1,−1,0,0).
pub fn standard_config() -> NullConfig {
    let z3 = RhoRational::monomial(rat(1, 2), -10);
    let z4 = RhoRational::rho_pow(10);
    let zetas = [
        CoVec4::from_ints([1, 0, 1, 0]),
        CoVec4::from_ints([-1, 0, 0, -1]),
        CoVec4::from_ints([1, 1, 0, 0]).scale(&z3),
        CoVec4::from_ints([1, -1, 0, 0]).scale(&z4),
    ];
    NullConfig::new(Metric4::minkowski(), zetas).expect("standard configuration violates its invariants")
}

/// α₃ making |Σ α_i ζ̃^(i)|² vanish under the Minkowski metric.
pub fn solve_null_scale(
    alpha1: &RhoRational,
    alpha2: &RhoRational,
    alpha4: &RhoRational,
    tilde: &[CoVec4; 4],
) -> Result<RhoRational, GeometryError> {
    solve_null_scale_in(&Metric4::minkowski(), alpha1, alpha2, alpha4, tilde)
}

pub fn solve_null_scale_in(
    m: &Metric4,
    alpha1: &RhoRational,
    alpha2: &RhoRational,
    alpha4: &RhoRational,
    tilde: &[CoVec4; 4],
) -> Result<RhoRational, GeometryError> {
    if !norm_sq(m, &tilde[2]).is_zero() {
        return Err(GeometryError::NonlinearCondition);
    }
    let c = &(&tilde[0].scale(alpha1) + &tilde[1].scale(alpha2)) + &tilde[3].scale(alpha4);
    let linear = pairing(m, &c, &tilde[2]);
    if linear.is_zero() {
        return Err(GeometryError::DegenerateScale);
    }
    Ok(-(norm_sq(m, &c) / (linear.scale(&int(2)))))
}

/// Leibniz expansion of det[ζ^(1); …; ζ^(4)].
pub fn determinant(rows: &[CoVec4; 4]) -> RhoRational {
    let mut acc = RhoRational::zero();
    for perm in (0..4).permutations(4) {
        let inversions = (0..4).tuple_combinations().filter(|&(a, b)| perm[a] > perm[b]).count();
        let mut term = RhoRational::one();
        for (r, &c) in perm.iter().enumerate() {
            term = &term * &rows[r][c];
            if term.is_zero() {
                break;
            }
        }
        if inversions % 2 == 1 {
            term = -term;
        }
        acc = acc + term;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlatPoint(pub [Rational; 4]);

impl FlatPoint {
    pub fn from_ints(c: [i64; 4]) -> Self {
        FlatPoint(c.map(int))
    }

    pub fn origin() -> Self {
        Self::from_ints([0; 4])
    }
}

impl fmt::Display for FlatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// True iff neither point lies in the closed causal future of the other.
pub fn causally_unrelated(p: &FlatPoint, q: &FlatPoint) -> bool {
    let d: Vec<Rational> = (0..4).map(|k| &q.0[k] - &p.0[k]).collect();
    let spatial: Rational = d[1..].iter().map(|x| x * x).sum();
    spatial > &d[0] * &d[0]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BacktraceReport {
    pub sources: [FlatPoint; 4],
    pub directions: [[Rational; 4]; 4],
    pub pairs: Vec<((usize, usize), bool)>,
    pub tangents_independent: bool,
}

impl BacktraceReport {
    pub fn all_unrelated(&self) -> bool {
        self.pairs.iter().all(|(_, u)| *u)
    }
}

/// Future-pointing direction of ζ♯ at the sample value, normalized to unit time component.
pub fn ray_direction(m: &Metric4, zeta: &CoVec4, rho_value: &Rational) -> [Rational; 4] {
    let up = m.raise(zeta);
    let v: Vec<Rational> = up
        .iter()
        .map(|c| c.eval_rational(rho_value).expect("pole at sample value"))
        .collect();
    let t = v[0].clone();
    assert!(!t.is_zero(), "light-like direction with zero time component");
    std::array::from_fn(|k| &v[k] / &t)
}

/// x^(i) = q₀ − t_i·θ^(i), with θ^(i) the future-normalized direction of ζ^(i)♯.
pub fn backtrace_sources(
    q0: &FlatPoint,
    config: &NullConfig,
    rho_value: &Rational,
    times: &[Rational; 4],
) -> BacktraceReport {
    let directions: [[Rational; 4]; 4] =
        std::array::from_fn(|i| ray_direction(config.metric(), config.zeta(i + 1), rho_value));
    let sources: [FlatPoint; 4] =
        std::array::from_fn(|i| FlatPoint(std::array::from_fn(|k| &q0.0[k] - &times[i] * &directions[i][k])));
    let pairs = (0..4)
        .tuple_combinations()
        .map(|(i, j)| ((i + 1, j + 1), causally_unrelated(&sources[i], &sources[j])))
        .collect();
    let rows: [CoVec4; 4] =
        std::array::from_fn(|i| CoVec4::new(std::array::from_fn(|k| RhoRational::constant(directions[i][k].clone()))));
    BacktraceReport {
        sources,
        directions,
        pairs,
        tangents_independent: !determinant(&rows).is_zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RhoRational {
        s.parse().unwrap()
    }

    #[test]
    fn standard_pairings() {
        let c = standard_config();
        let expect = [
            ((1, 2), "1"),
            ((1, 3), "-1/2*rho^-10"),
            ((1, 4), "-rho^10"),
            ((2, 3), "1/2*rho^-10"),
            ((2, 4), "rho^10"),
            ((3, 4), "-1"),
        ];
        for ((ij, v), (kl, w)) in c.pairing_table().iter().zip(expect) {
            assert_eq!(*ij, kl);
            assert_eq!(*v, r(w));
        }
        assert_eq!(c.zeta(2), &CoVec4::from_ints([-1, 0, 0, -1]));
    }

    #[test]
    fn solver_examples() {
        let t = tilde_zetas();
        let a3 = solve_null_scale(&r("1"), &r("-1"), &r("rho^10"), &t).unwrap();
        assert_eq!(a3, r("-1/2*rho^-10"));
        assert!(solve_null_scale(&r("0"), &r("0"), &r("rho^3"), &t).unwrap().is_zero());
        let a = solve_null_scale(&r("1"), &r("1"), &r("1"), &t).unwrap();
        let z = &(&(&t[0] + &t[1]) + &t[2].scale(&a)) + &t[3];
        assert!(norm_sq(&Metric4::minkowski(), &z).is_zero());
    }

    #[test]
    fn degenerate_solver_reports() {
        let mut t = tilde_zetas();
        t[2] = CoVec4::from_ints([1, 0, 1, 0]);
        t[0] = t[2].clone();
        assert_eq!(
            solve_null_scale(&r("1"), &r("0"), &r("0"), &t),
            Err(GeometryError::DegenerateScale)
        );
        t[2] = CoVec4::from_ints([1, 1, 1, 0]);
        assert_eq!(
            solve_null_scale(&r("1"), &r("0"), &r("0"), &t),
            Err(GeometryError::NonlinearCondition)
        );
    }

    #[test]
    fn causal_examples() {
        let o = FlatPoint::origin();
        assert!(causally_unrelated(&o, &FlatPoint::from_ints([0, 5, 0, 0])));
        assert!(!causally_unrelated(&o, &FlatPoint::from_ints([2, 1, 0, 0])));
        assert!(!causally_unrelated(&o, &FlatPoint::from_ints([1, 1, 0, 0])));
        assert!(!causally_unrelated(&o, &o));
    }

    #[test]
    fn invalid_configs_rejected() {
        let c = standard_config();
        let mut z = c.zetas().clone();
        z[0] = CoVec4::from_ints([1, 1, 1, 0]);
        assert!(matches!(
            NullConfig::new(Metric4::minkowski(), z),
            Err(GeometryError::NotNull(1, _))
        ));
        let mut z = c.zetas().clone();
        z[1] = z[0].clone();
        assert!(matches!(
            NullConfig::new(Metric4::minkowski(), z),
            Err(GeometryError::Dependent)
        ));
    }

    #[test]
    fn degenerate_time_puts_source_at_q0() {
        let c = standard_config();
        let times = [int(0), int(1), int(1), int(1)];
        let rep = backtrace_sources(&FlatPoint::origin(), &c, &int(2), &times);
        assert_eq!(rep.sources[0], FlatPoint::origin());
        assert!(!rep.all_unrelated());
        assert!(rep.tangents_independent);
    }
}
