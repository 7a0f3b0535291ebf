//! The H operator in residue form and in moduli form, and free energies.

use serde::Serialize;

use crate::algebra::{Field, Point, RationalFunction, Ring, Scalar, Series};
use crate::curve::{roots::roots_in_field, Rf, SpectralCurve};
use crate::error::{Error, Result};
use crate::kernels;
use crate::recursion::{Basis, CorrelatorKey, Engine, Tensor};

/// H on slot `slot` of a tensor: −Σ_a Res_{p→a} Ψ_a(p)·ψ(p) over the poles a of ψ.
pub fn h_apply_tensor(curve: &SpectralCurve, t: &Tensor, slot: u16) -> Result<Tensor> {
    let residues = t.contract(slot, &mut |b| Ok(if b.order == 1 { Scalar::one() } else { Scalar::zero() }))?;
    if !residues.is_empty() {
        return Err(Error::Contract(format!("argument of H has residues: {residues:?}")));
    }
    t.contract(slot, &mut |b: &Basis| {
        let psi = kernels::psi_germ(curve, &b.point, b.order as i64 + 1)?;
        Ok(psi.coeff(b.order as i64 - 1)?.negate())
    })
}

/// H on a one-slot tensor, as a scalar.
pub fn h_apply(curve: &SpectralCurve, t: &Tensor) -> Result<Scalar> {
    h_apply_tensor(curve, t, 0)?.as_scalar().ok_or_else(|| Error::Contract("H of a one-form must be a number".into()))
}

/// H on a rational one-form `psi` over any field containing ℚ(θ), taking
/// residues at the given poles. The local primitive of y dx is built at each
/// pole, so poles may be symbolic.
pub fn h_apply_rational<F: Field>(curve: &SpectralCurve, psi: &RationalFunction<F>, poles: &[F]) -> Result<F> {
    let ydx: RationalFunction<F> = curve.ydx().map(F::from_scalar);
    let mut acc = F::zero();
    for a in poles {
        let at = Point::Finite(a.clone());
        let vpsi = psi.valuation_at(a);
        if vpsi >= 0 {
            continue;
        }
        if !psi.residue_at(a)?.is_zero() {
            return Err(Error::Contract("argument of H has a residue".into()));
        }
        let w = ydx.valuation_at(a);
        let prim = if w == i64::MAX {
            continue;
        } else {
            // Ψ known below 1 − vpsi
            let order = -vpsi;
            let local = match ydx.expand_at(&at, order) {
                Ok(s) => s,
                Err(Error::EmptyExpansion { .. }) => continue,
                Err(e) => return Err(e),
            };
            if !local.coeff(-1).map(|c| c.is_zero()).unwrap_or(true) {
                return Err(Error::LogarithmicPrimitive("nonzero".into(), format!("{a:?}")));
            }
            local.integrate()?
        };
        let vprim = prim.valuation().unwrap_or(prim.prec());
        let local_psi = psi.expand_at(&at, -vprim.min(0) + 1)?;
        let prod = prim.times(&local_psi);
        acc = acc.minus(&prod.residue()?);
    }
    Ok(acc)
}

/// A modulus of the curve: the coefficient of ζ^{-k-1}dζ in y dx at a pole
/// of y dx, ζ being the local coordinate there (1/z at infinity).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Modulus {
    pub point: String,
    #[serde(skip)]
    pub location: Point<Scalar>,
    pub k: u32,
    pub t: Scalar,
}

/// Coefficient of dζ of the form f(z)dz in the local coordinate at `point`.
pub fn form_at(f: &Rf, point: &Point<Scalar>, order: i64) -> Result<Series<Scalar>> {
    let r = match point {
        Point::Finite(_) => f.expand_at(point, order),
        Point::Infinity => f.expand_at(point, order + 2).map(|s| s.shift(-2).negate()),
    };
    match r {
        Err(Error::EmptyExpansion { .. }) => Ok(Series::zero_to(order)),
        other => other,
    }
}

fn ydx_poles(curve: &SpectralCurve) -> Result<Vec<Point<Scalar>>> {
    let roots = roots_in_field(curve.ydx().den())
        .map_err(|e| Error::UnsupportedCurve(format!("poles of y dx: {e}")))?;
    let mut out: Vec<Point<Scalar>> = roots.into_iter().map(|(r, _)| Point::Finite(r)).collect();
    out.push(Point::Infinity);
    Ok(out)
}

fn point_label(p: &Point<Scalar>) -> String {
    match p {
        Point::Finite(a) => a.to_string(),
        Point::Infinity => "inf".into(),
    }
}

/// All nonzero moduli t_{c,k}, k ≥ 0, of y dx.
pub fn moduli(curve: &SpectralCurve) -> Result<Vec<Modulus>> {
    let mut out = Vec::new();
    for c in ydx_poles(curve)? {
        let v = match &c {
            Point::Finite(a) => curve.ydx().valuation_at(a),
            Point::Infinity => curve.ydx().valuation_at_infinity() - 2,
        };
        if v >= 0 {
            continue;
        }
        let local = form_at(curve.ydx(), &c, 0)?;
        for (e, t) in local.terms() {
            out.push(Modulus { point: point_label(&c), location: c.clone(), k: (-e - 1) as u32, t: t.clone() });
        }
    }
    Ok(out)
}

/// J_{c,k}(ψ) for a one-slot tensor ψ: (1/k)Res ζ^{-k}ψ for k ≥ 1, and the
/// integral of ψ from the basepoint to c for k = 0.
pub fn j_apply(curve: &SpectralCurve, m: &Modulus, psi: &Tensor) -> Result<Scalar> {
    if m.k == 0 {
        // ψ = dφ with φ = Σ −c/((d−1)(z−a)^{d−1})
        let phi_at = |p: &Point<Scalar>| -> Result<Scalar> {
            let mut acc = Scalar::zero();
            for (key, c) in psi.terms() {
                let b = match key.as_slice() {
                    [(0, b)] => b,
                    _ => return Err(Error::Contract("J acts on one-slot forms".into())),
                };
                if b.order == 1 {
                    return Err(Error::Regularization(format!(
                        "logarithmic term at {} does not cancel",
                        b.point
                    )));
                }
                if let Point::Finite(z) = p {
                    let d = z.minus(&b.point).pow(b.order as i64 - 1);
                    let d = d.inverse().ok_or_else(|| Error::Pole(format!("integration endpoint {z} is a pole")))?;
                    acc = acc.minus(&c.times(&d).times(&Scalar::int(b.order as i64 - 1).inverse().unwrap()));
                }
            }
            Ok(acc)
        };
        return Ok(phi_at(&m.location)?.minus(&phi_at(&Point::Finite(curve.basepoint().clone()))?));
    }
    let f = psi.to_rational(0)?;
    let local = form_at(&f, &m.location, m.k as i64)?;
    Ok(local.coeff(m.k as i64 - 1)?.times(&Scalar::int(m.k as i64).inverse().unwrap()))
}

/// −Σ_a t_a J_a(ψ).
pub fn h_moduli(curve: &SpectralCurve, psi: &Tensor) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for m in moduli(curve)? {
        acc = acc.minus(&m.t.times(&j_apply(curve, &m, psi)?));
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct FreeEnergy {
    pub h: usize,
    pub value: Scalar,
    /// Share of each branch point, in curve order.
    pub contributions: Vec<Scalar>,
}

/// F^(h) = H[w_1^(h)]/(2h − 2) for h ≥ 2.
pub fn free_energy(engine: &Engine, h: usize) -> Result<FreeEnergy> {
    if h < 2 {
        return Err(Error::Usage(format!("free energy is computed for h >= 2, got {h}")));
    }
    let w = engine.correlator(&CorrelatorKey::symbolic(h, 1))?;
    let norm = Scalar::int(2 * h as i64 - 2).inverse().unwrap();
    let curve = engine.curve();
    let value = h_apply(curve, &w.tensor)?.times(&norm);
    let contributions =
        w.contributions.iter().map(|t| Ok(h_apply(curve, t)?.times(&norm))).collect::<Result<Vec<_>>>()?;
    Ok(FreeEnergy { h, value, contributions })
}
