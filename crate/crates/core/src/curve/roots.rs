//! Roots of polynomials over ℚ(θ) that lie in ℚ(θ).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::algebra::{Field, Polynomial, Ring, Scalar};
use crate::error::{Error, Result};

type P = Polynomial<Scalar>;

fn conj_poly(p: &P) -> P {
    p.map(Scalar::conj)
}

/// Integer polynomial proportional to a rational one.
fn clear_denominators(p: &P) -> Vec<BigInt> {
    let l = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.re().denom()));
    p.coeffs().iter().map(|c| (c.re() * BigRational::from_integer(l.clone())).to_integer()).collect()
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs().to_u64().ok_or_else(|| Error::Field("coefficient too large for root search".into()))?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if d > 10_000_000 {
            return Err(Error::Field("coefficient too large for root search".into()));
        }
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// Distinct rational roots of a polynomial with rational coefficients.
fn rational_roots(p: &P) -> Result<Vec<Scalar>> {
    let mut out = Vec::new();
    let mut p = p.clone();
    if p.valuation().unwrap_or(0) > 0 {
        out.push(Scalar::zero());
        let v = p.valuation().unwrap();
        p = P::new(p.coeffs()[v..].to_vec());
    }
    if p.is_constant() {
        return Ok(out);
    }
    let ints = clear_denominators(&p);
    let a0 = ints[0].clone();
    let an = ints.last().unwrap().clone();
    let (dp, dq) = (divisors(&a0)?, divisors(&an)?);
    let mut seen = std::collections::BTreeSet::new();
    for num in &dp {
        for den in &dq {
            for sign in [1, -1] {
                let r = BigRational::new(num * sign, den.clone());
                if seen.insert(r.clone()) {
                    let s = Scalar::rational(r);
                    if p.eval(&s).is_zero() {
                        out.push(s);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Exact square root of a nonnegative rational, if it is a square.
fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

/// Roots in ℚ(θ) of a rational quadratic.
fn quadratic_roots(p: &P) -> Vec<Scalar> {
    let (c, b, a) = (p.coeff(0), p.coeff(1), p.coeff(2));
    let disc = b.times(&b).minus(&a.times(&c).scale(&Scalar::int(4)));
    let disc_q = disc.re().clone();
    let two_a_inv = a.scale(&Scalar::int(2)).inverse().expect("nonzero leading coefficient");
    let sqrt = if let Some(r) = rational_sqrt(&disc_q) {
        Scalar::rational(r)
    } else if let Some(r) = rational_sqrt(&(-disc_q / BigRational::from_integer(3.into()))) {
        // √(−3) = 1 + 2θ
        Scalar::new(r.clone(), r * BigRational::from_integer(2.into()))
    } else {
        return Vec::new();
    };
    let nb = b.negate();
    vec![nb.plus(&sqrt).times(&two_a_inv), nb.minus(&sqrt).times(&two_a_inv)]
}

/// All roots of `p` in ℚ(θ) with multiplicities. Errors when some root lies
/// outside ℚ(θ) (or cannot be located by the rational/quadratic search).
pub fn roots_in_field(p: &P) -> Result<Vec<(Scalar, usize)>> {
    if p.is_zero() {
        return Err(Error::Field("zero polynomial has no isolated roots".into()));
    }
    let rational_coeffs = p.coeffs().iter().all(Scalar::is_rational);
    let norm = if rational_coeffs { p.clone() } else { p.times(&conj_poly(p)) };
    let sqfree = {
        let g = norm.gcd(&norm.derivative());
        norm.div_rem(&g).0
    };
    let mut candidates = rational_roots(&sqfree)?;
    let mut rest = sqfree.clone();
    for r in &candidates {
        rest = rest.div_rem(&P::linear_root(r)).0;
    }
    match rest.degree() {
        Some(0) | None => {}
        Some(2) => {
            let q = quadratic_roots(&rest);
            if q.is_empty() {
                return Err(Error::Field(format!("roots of {} lie outside Q(w)", rest.render("z"))));
            }
            candidates.extend(q);
        }
        Some(_) => {
            return Err(Error::Field(format!("cannot locate roots of {} in Q(w)", rest.render("z"))));
        }
    }
    let mut out: Vec<(Scalar, usize)> = candidates
        .into_iter()
        .map(|r| {
            let m = p.root_multiplicity(&r);
            (r, m)
        })
        .filter(|(_, m)| *m > 0)
        .collect();
    out.sort();
    let found: usize = out.iter().map(|(_, m)| m).sum();
    if found != p.degree().unwrap() {
        return Err(Error::Field(format!("polynomial {} does not split over Q(w)", p.render("z"))));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> P {
        P::new(v.iter().map(|&c| Scalar::int(c)).collect())
    }

    #[test]
    fn rational_and_cyclotomic_roots() {
        // 3z² + 2z = z(3z + 2)
        let r = roots_in_field(&p(&[0, 2, 3])).unwrap();
        assert_eq!(r, vec![(Scalar::frac(-2, 3), 1), (Scalar::zero(), 1)]);
        // z² + z + 1 has roots θ, θ²
        let r = roots_in_field(&p(&[1, 1, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|(x, _)| *x == Scalar::theta()));
        assert!(roots_in_field(&p(&[-2, 0, 1])).is_err());
        assert_eq!(roots_in_field(&p(&[0, 0, 3])).unwrap(), vec![(Scalar::zero(), 2)]);
    }
}
