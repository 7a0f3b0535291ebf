//! The H operator, moduli operators, free energies and the identity suite
//! used to validate the recursion.

mod checks;
mod hop;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Scalar;
use crate::curve::{Rf, SpectralCurve};
use crate::error::{Error, Result};
use crate::recursion::{CorrelatorKey, Engine, Tensor};

pub use checks::*;
pub use hop::*;

/// `n` distinct rational points, deterministic in `seed`, away from branch
/// points, the basepoint, poles of x and y, and each other's fibers.
pub fn sample_points(curve: &SpectralCurve, seed: u64, n: usize) -> Vec<Scalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Scalar> = Vec::with_capacity(n);
    while out.len() < n {
        let num: i64 = rng.gen_range(1..=13) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let den: i64 = rng.gen_range(1..=5);
        let p = Scalar::frac(num, den);
        let bad = curve.branch_points().iter().any(|b| b.location == p)
            || *curve.basepoint() == p
            || curve.x().eval(&p).is_err()
            || curve.y().eval(&p).is_err()
            || out.iter().any(|q| curve.fiber(q).map(|f| f.contains(&p)).unwrap_or(true));
        if !bad {
            out.push(p);
        }
    }
    out
}

/// w_k^(h)(pts[0], ..., pts[k−1]) as a number.
pub fn value_at(engine: &Engine, h: usize, pts: &[Scalar]) -> Result<Scalar> {
    let (first, rest) = pts.split_first().ok_or_else(|| Error::Usage("no evaluation points".into()))?;
    let w = engine.correlator(&CorrelatorKey::with_points(h, rest))?;
    w.tensor.evaluate_slot(0, first)?.as_scalar().ok_or_else(|| Error::Contract("evaluation left symbolic slots".into()))
}

/// Restriction of a multi-slot tensor to the diagonal, all slots at one z.
pub fn diagonal(t: &Tensor) -> Rf {
    let mut acc = Rf::zero();
    for (key, c) in t.terms() {
        let mut term = Rf::constant(c.clone());
        for (_, b) in key {
            term = term.times(&b.to_rational());
        }
        acc = acc.plus(&term);
    }
    acc
}
