//! Exact topological recursion on genus-0 spectral curves.
//!
//! Correlator differentials `w_k^(h)` are produced by residue formulas at the
//! branch points of a rationally parametrized curve `(x(z), y(z))`. Simple
//! branch points contribute cubic vertices, branch points where `dx` has a
//! double zero contribute both cubic and quartic vertices. All arithmetic is
//! exact over ℚ or ℚ(θ), θ² + θ + 1 = 0.

pub mod algebra;
pub mod curve;
pub mod error;
pub mod kernels;
pub mod identities;
pub mod recursion;

pub use error::{Error, Result};
