//! Exact arithmetic: scalars in ℚ(θ), polynomials, rational functions and
//! truncated Laurent series with precision tracking.

mod poly;
mod ratfunc;
mod scalar;
mod series;

pub use poly::Polynomial;
pub use ratfunc::{Point, RationalFunction};
pub use scalar::{FieldSpec, Scalar};
pub use series::{Series, EXACT};

use std::fmt::Debug;

/// Commutative ring containing a copy of ℚ(θ).
pub trait Ring: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;
    fn from_scalar(s: &Scalar) -> Self;

    fn scale(&self, s: &Scalar) -> Self {
        self.times(&Self::from_scalar(s))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Nesting depth of the coefficient tower; scalars have depth 0.
    fn depth() -> usize {
        0
    }
}

pub trait Field: Ring {
    fn inverse(&self) -> Option<Self>;

    fn divide(&self, rhs: &Self) -> Option<Self> {
        rhs.inverse().map(|r| self.times(&r))
    }
}
