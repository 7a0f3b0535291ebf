//! Fundamental differentials of the recursion: the Bergman kernel, the
//! third-kind differential, recursion denominators ω(t, ϑ^j t), the local
//! primitive Ψ of y dx, and the barred/unbarred shift.
//!
//! Differentials are represented by the coefficient of their `d`-factors; the
//! [`Differential`] wrapper records which symbols those factors belong to.

use crate::algebra::{Field, Point, RationalFunction, Ring, Scalar, Series};
use crate::curve::{Rf, SpectralCurve};
use crate::error::{Error, Result};

/// Rational functions of two variables: outer variable over ℚ(θ)(inner).
pub type Rf2 = RationalFunction<Rf>;

/// `payload · d(symbols[0]) ⋯ d(symbols[n-1])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Differential<P> {
    pub payload: P,
    pub symbols: Vec<String>,
}

impl<P> Differential<P> {
    pub fn new(payload: P, symbols: &[&str]) -> Self {
        Differential { payload, symbols: symbols.iter().map(|s| s.to_string()).collect() }
    }

    pub fn degree(&self) -> usize {
        self.symbols.len()
    }
}

impl<F: Field> Differential<F> {
    pub fn times(&self, rhs: &Self) -> Self {
        let mut symbols = self.symbols.clone();
        symbols.extend(rhs.symbols.iter().cloned());
        Differential { payload: self.payload.times(&rhs.payload), symbols }
    }

    /// Ratio of differentials; `d`-factors of `rhs` cancel against ours.
    pub fn ratio(&self, rhs: &Self) -> Result<Self> {
        let mut symbols = self.symbols.clone();
        for s in &rhs.symbols {
            let pos = symbols
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::Contract(format!("cannot cancel d{s} in a ratio of differentials")))?;
            symbols.remove(pos);
        }
        let payload = self.payload.divide(&rhs.payload).ok_or(Error::DivisionByZero)?;
        Ok(Differential { payload, symbols })
    }
}

/// A point depending on a working variable `s`: its coordinate `z(s)` and `dz/ds`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPoint {
    pub z: Series<Scalar>,
    pub dz: Series<Scalar>,
}

impl SeriesPoint {
    pub fn new(z: Series<Scalar>) -> Self {
        let dz = z.derivative();
        SeriesPoint { z, dz }
    }

    /// `α + s`.
    pub fn local(alpha: &Scalar) -> Self {
        SeriesPoint::new(Series::constant(alpha.clone()).plus(&Series::var()))
    }
}

/// Inverse of `u^d` for a series `u`, truncating exact multi-term inputs to
/// relative precision `rel`.
pub(crate) fn inverse_power(u: &Series<Scalar>, d: u32, rel: i64) -> Result<Series<Scalar>> {
    let v = u.valuation().ok_or_else(|| Error::Pole("argument coincides with a pole".into()))?;
    let u = u.truncate(v + rel);
    Ok(u.recip()?.pow_nonneg(d))
}

/// B at two concrete points: the coefficient of dz₁dz₂.
pub fn bergman_points(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    let d = a.minus(b);
    if d.is_zero() {
        return Err(Error::Pole(format!("Bergman kernel at coincident points {a}")));
    }
    Ok(d.times(&d).inverse().expect("nonzero"))
}

/// B(q, p) = dq dp/(q − p)² with q the outer and p the inner variable.
pub fn bergman_symbolic() -> Differential<Rf2> {
    let q_minus_p = Rf2::var().minus(&Rf2::constant(Rf::var()));
    let b = q_minus_p.pow(-2).expect("nonzero");
    Differential::new(b, &["q", "p"])
}

/// B(a(s), b(s)) as the coefficient of ds², relative precision `rel`.
pub fn bergman_series(a: &SeriesPoint, b: &SeriesPoint, rel: i64) -> Result<Series<Scalar>> {
    let diff = a.z.minus(&b.z);
    Ok(a.dz.times(&b.dz).times(&inverse_power(&diff, 2, rel)?))
}

/// B(a(s), p) for a concrete p: the coefficient of ds·dp.
pub fn bergman_series_point(a: &SeriesPoint, p: &Scalar, rel: i64) -> Result<Series<Scalar>> {
    let diff = a.z.minus(&Series::constant(p.clone()));
    Ok(a.dz.times(&inverse_power(&diff, 2, rel)?))
}

/// dS_{t,o}(q) = (1/(q − t) − 1/(q − o)) dq as a rational function of q.
pub fn third_kind(t: &Scalar, o: &Scalar) -> Result<Differential<Rf>> {
    if t == o {
        return Err(Error::Contract("third-kind differential with coincident endpoints is zero".into()));
    }
    let one = Scalar::one();
    let f = Rf::pole(one.clone(), t, 1).minus(&Rf::pole(one, o, 1));
    Ok(Differential::new(f, &["q"]))
}

/// dS_{t,o}(q) with both q (outer) and t (inner) symbolic.
pub fn third_kind_symbolic(o: &Scalar) -> Differential<Rf2> {
    let q = Rf2::var();
    let t = Rf2::constant(Rf::var());
    let a = q.minus(&t).recip().expect("nonzero");
    let b = q.minus(&Rf2::constant(Rf::constant(o.clone()))).recip().expect("nonzero");
    Differential::new(a.minus(&b), &["q"])
}

/// ω(t, ϑ^j t) = (y(t) − y(ϑ^j t))·dx(t) near branch point `bp`, with t = α + s;
/// the coefficient of ds, known below `order`.
pub fn omega_j(curve: &SpectralCurve, bp: usize, j: usize, order: i64) -> Result<Series<Scalar>> {
    let b = &curve.branch_points()[bp];
    if j == 0 {
        return Ok(Series::exact_zero());
    }
    let at = Point::Finite(b.location.clone());
    let vy = curve.y().valuation_at(&b.location).min(0);
    let nb = b.nb as i64;
    let y = curve.y().expand_at(&at, order - nb)?;
    let dx = curve.dx().expand_at(&at, order - vy)?;
    let germ = curve.deck_germ(bp, j, order - nb - vy + 1)?;
    let y_moved = y.compose(&germ.series)?;
    Ok(y.minus(&y_moved).times(&dx).truncate(order))
}

/// Local antiderivative of y dx at `point` (constant term zero).
pub fn psi_germ(curve: &SpectralCurve, point: &Scalar, order: i64) -> Result<Series<Scalar>> {
    let ydx = match curve.ydx().expand_at(&Point::Finite(point.clone()), order - 1) {
        Err(Error::EmptyExpansion { .. }) => return Ok(Series::zero_to(order)),
        other => other?,
    };
    let r = ydx.residue()?;
    if !r.is_zero() {
        return Err(Error::LogarithmicPrimitive(r.to_string(), point.to_string()));
    }
    ydx.integrate()
}

/// x'(q)x'(p)/(x(q) − x(p))², the double-pole term separating w₂^(0) from its barred form.
pub fn sheet_kernel(curve: &SpectralCurve) -> Rf2 {
    let lift = |f: &Rf| f.map(|c| Rf::constant(c.clone()));
    let xq = lift(curve.x());
    let dxq = lift(curve.dx());
    let xp = Rf2::constant(curve.x().clone());
    let dxp = Rf2::constant(curve.dx().clone());
    let diff = xq.minus(&xp);
    dxq.times(&dxp).divide(&diff.times(&diff)).expect("x is not constant")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarDirection {
    /// w₂ ↦ w̄₂ = w₂ − dx dx/(x − x)².
    ToBarred,
    /// w̄₂ ↦ w₂.
    ToUnbarred,
}

pub fn bar_shift(curve: &SpectralCurve, w2: &Differential<Rf2>, direction: BarDirection) -> Differential<Rf2> {
    let k = sheet_kernel(curve);
    let payload = match direction {
        BarDirection::ToBarred => w2.payload.minus(&k),
        BarDirection::ToUnbarred => w2.payload.plus(&k),
    };
    Differential { payload, symbols: w2.symbols.clone() }
}

/// Pull a one-variable function back along a rational map: f(σ(z))·σ'(z).
pub fn pullback(f: &Rf, sigma: &Rf) -> Rf {
    f.compose(sigma).times(&sigma.derivative())
}

/// Lift a one-variable function of q to the outer variable of [`Rf2`].
pub fn lift_outer(f: &Rf) -> Rf2 {
    f.map(|c| Rf::constant(c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_kind_residues() {
        let ds = third_kind(&Scalar::int(2), &Scalar::int(1)).unwrap();
        assert_eq!(ds.payload.residue_at(&Scalar::int(2)).unwrap(), Scalar::int(1));
        assert_eq!(ds.payload.residue_at(&Scalar::int(1)).unwrap(), Scalar::int(-1));
        assert!(third_kind(&Scalar::int(1), &Scalar::int(1)).is_err());
    }

    #[test]
    fn bergman_at_points() {
        assert_eq!(bergman_points(&Scalar::int(2), &Scalar::int(3)).unwrap(), Scalar::int(1));
        assert!(bergman_points(&Scalar::int(2), &Scalar::int(2)).is_err());
    }

    #[test]
    fn differential_degrees() {
        let a = Differential::new(Scalar::int(2), &["t"]);
        let b = Differential::new(Scalar::int(4), &["t", "q"]);
        let r = b.ratio(&a).unwrap();
        assert_eq!(r.symbols, vec!["q".to_string()]);
        assert_eq!(r.payload, Scalar::int(2));
        assert_eq!(a.times(&b).degree(), 3);
    }
}
