//! Exact scalars: rationals, polynomials and rational functions in the
//! asymptotic parameter ρ, plus truncated expansions at ρ = ∞.

pub mod laurent;
pub mod parse;
pub mod poly;
pub mod rational;
pub mod rho;
pub mod ring;

pub use laurent::{expand_at_infinity, LaurentTail};
pub use poly::Poly;
pub use rational::{int, rat, Rational};
pub use rho::{AlgebraError, RhoRational};
pub use ring::{MaxPlus, Ring};
