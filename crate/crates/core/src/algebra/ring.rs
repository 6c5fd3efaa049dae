use super::rational::Rational;
use num_traits::{One, Zero};
use std::fmt::Debug;

/// Commutative ring interface shared by every scalar the contraction engine runs over.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

/// Max-plus degree semiring: sums take the larger degree, products add degrees.
///
/// Evaluating a contraction in this semiring bounds the degree at infinity of the
/// exact result from above, since cancellation can only lower a degree.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub struct MaxPlus(pub Option<i64>);

impl MaxPlus {
    pub const NEG_INF: MaxPlus = MaxPlus(None);
}

impl Ring for MaxPlus {
    fn zero() -> Self {
        MaxPlus(None)
    }
    fn one() -> Self {
        MaxPlus(Some(0))
    }
    fn from_rational(q: &Rational) -> Self {
        if Zero::is_zero(q) {
            MaxPlus(None)
        } else {
            MaxPlus(Some(0))
        }
    }
    fn is_zero(&self) -> bool {
        self.0.is_none()
    }
    fn add_ref(&self, other: &Self) -> Self {
        MaxPlus(self.0.max(other.0))
    }
    fn mul_ref(&self, other: &Self) -> Self {
        match (self.0, other.0) {
            (Some(a), Some(b)) => MaxPlus(Some(a + b)),
            _ => MaxPlus(None),
        }
    }
    fn neg_ref(&self) -> Self {
        *self
    }
}
