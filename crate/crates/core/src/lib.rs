//! Exact symbol calculus for the four-fold interaction of linearized
//! gravitational waves in wave gauge.

pub mod algebra;
pub mod conformal;
pub mod gauge;
pub mod interaction;
pub mod null_geometry;
pub mod orders;
pub mod report;
pub mod ricci;
pub mod scenario;
pub mod suite;
pub mod tensor;

pub use algebra::{LaurentTail, MaxPlus, Poly, Rational, RhoRational, Ring};
pub use interaction::{Evaluator, SignedTerm, TermAst};
pub use null_geometry::{standard_config, NullConfig};
pub use report::{Report, Section, Verdict};
pub use ricci::{FormKey, FormalTensorPoly};
pub use scenario::{Format, Scenario};
pub use suite::{Command, Target};
pub use tensor::{CoVec4, Metric4, Sym2T};
