use std::fmt;

use super::poly::render_monomial;
use super::{Field, Polynomial, Ring, Scalar, Series};
use crate::error::{Error, Result};

/// Expansion point: a finite value or infinity (local coordinate `1/z`).
#[derive(Clone, Debug, PartialEq)]
pub enum Point<F> {
    Finite(F),
    Infinity,
}

/// Reduced quotient of polynomials with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction<F> {
    num: Polynomial<F>,
    den: Polynomial<F>,
}

impl<F: Field> RationalFunction<F> {
    pub fn new(num: Polynomial<F>, den: Polynomial<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Polynomial<F>, den: Polynomial<F>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() { (num, den) } else { (num.div_rem(&g).0, den.div_rem(&g).0) };
        let lead_inv = den.leading().and_then(Field::inverse).expect("nonzero denominator");
        RationalFunction { num: num.mul_coeff(&lead_inv), den: den.mul_coeff(&lead_inv) }
    }

    pub fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn constant(c: F) -> Self {
        RationalFunction { num: Polynomial::constant(c), den: Polynomial::one() }
    }

    pub fn from_poly(p: Polynomial<F>) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    /// The uniformizing variable `z`.
    pub fn var() -> Self {
        Self::from_poly(Polynomial::var())
    }

    /// `c·z^e` for any integer `e`.
    pub fn laurent_monomial(c: F, e: i64) -> Self {
        if e >= 0 {
            Self::reduce(Polynomial::monomial(c, e as usize), Polynomial::one())
        } else {
            Self::reduce(Polynomial::constant(c), Polynomial::monomial(F::one(), (-e) as usize))
        }
    }

    /// `c/(z − a)^d`.
    pub fn pole(c: F, a: &F, d: u32) -> Self {
        Self::reduce(Polynomial::constant(c), Polynomial::linear_root(a).pow(d))
    }

    pub fn num(&self) -> &Polynomial<F> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<F> {
        (self.num.is_constant() && self.den.is_constant()).then(|| self.num.coeff(0))
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self::reduce(self.num.plus(&rhs.num), self.den.clone());
        }
        Self::reduce(self.num.times(&rhs.den).plus(&rhs.num.times(&self.den)), self.den.times(&rhs.den))
    }

    pub fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negate())
    }

    pub fn negate(&self) -> Self {
        RationalFunction { num: self.num.negate(), den: self.den.clone() }
    }

    pub fn times(&self, rhs: &Self) -> Self {
        Self::reduce(self.num.times(&rhs.num), self.den.times(&rhs.den))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn divide(&self, rhs: &Self) -> Result<Self> {
        Ok(self.times(&rhs.recip()?))
    }

    pub fn mul_coeff(&self, c: &F) -> Self {
        Self::reduce(self.num.mul_coeff(c), self.den.clone())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::reduce(self.num.scale(s), self.den.clone())
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Ok(RationalFunction { num: base.num.pow(e), den: base.den.pow(e) })
    }

    /// Value at a point; errors at a pole.
    pub fn eval(&self, x: &F) -> Result<F> {
        let d = self.den.eval(x);
        d.inverse()
            .map(|di| self.num.eval(x).times(&di))
            .ok_or_else(|| Error::Pole(format!("{:?} is a pole", x)))
    }

    /// `self(inner(z))`.
    pub fn compose(&self, inner: &Self) -> Self {
        // With inner = a/b: p(a/b) = hom_p(a,b)/b^deg p.
        let hom = |p: &Polynomial<F>| -> (Polynomial<F>, usize) {
            let n = p.degree().unwrap_or(0);
            let mut acc = Polynomial::zero();
            let mut apow = Polynomial::one();
            for i in 0..=n {
                let term = apow.times(&inner.den.pow((n - i) as u32)).mul_coeff(&p.coeff(i));
                acc = acc.plus(&term);
                apow = apow.times(&inner.num);
            }
            (acc, n)
        };
        let (hn, dn) = hom(&self.num);
        let (hd, dd) = hom(&self.den);
        let (num, den) = if dd >= dn {
            (hn.times(&inner.den.pow((dd - dn) as u32)), hd)
        } else {
            (hn, hd.times(&inner.den.pow((dn - dd) as u32)))
        };
        Self::reduce(num, den)
    }

    pub fn derivative(&self) -> Self {
        let n = self.num.derivative().times(&self.den).minus(&self.num.times(&self.den.derivative()));
        Self::reduce(n, self.den.times(&self.den))
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> RationalFunction<G> {
        RationalFunction::reduce(self.num.map(&f), self.den.map(&f))
    }

    /// Order of vanishing (negative for a pole) at a finite point.
    pub fn valuation_at(&self, a: &F) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        self.num.root_multiplicity(a) as i64 - self.den.root_multiplicity(a) as i64
    }

    /// Order of vanishing at infinity in the coordinate `1/z`.
    pub fn valuation_at_infinity(&self) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        self.den.degree().unwrap() as i64 - self.num.degree().unwrap() as i64
    }

    /// Laurent expansion in the local coordinate, valid below `order`.
    pub fn expand_at(&self, point: &Point<F>, order: i64) -> Result<Series<F>> {
        if self.is_zero() {
            return Ok(Series::zero_to(order));
        }
        let (n, d, extra) = match point {
            Point::Finite(a) => {
                let shift = Polynomial::new(vec![a.clone(), F::one()]);
                (self.num.compose(&shift), self.den.compose(&shift), 0i64)
            }
            Point::Infinity => {
                let dn = self.num.degree().unwrap();
                let dd = self.den.degree().unwrap();
                (self.num.reversed(dn), self.den.reversed(dd), dd as i64 - dn as i64)
            }
        };
        let vn = n.valuation().unwrap() as i64;
        let vd = d.valuation().unwrap() as i64;
        let v = vn - vd + extra;
        if order <= v {
            return Err(Error::EmptyExpansion { order, valuation: v });
        }
        let rel = order - v;
        let num = Series::from_coeffs(0, n.coeffs()[vn as usize..].to_vec(), rel);
        let den = Series::from_coeffs(0, d.coeffs()[vd as usize..].to_vec(), rel);
        Ok(num.divide(&den)?.shift(v))
    }

    /// Residue of `self·dz` at a finite point.
    pub fn residue_at(&self, a: &F) -> Result<F> {
        let v = self.valuation_at(a);
        if v >= 0 {
            return Ok(F::zero());
        }
        self.expand_at(&Point::Finite(a.clone()), 0)?.residue()
    }

    /// Evaluate at a series argument, with denominators inverted to `cap`.
    pub fn eval_series(&self, g: &Series<F>, cap: i64) -> Result<Series<F>> {
        let g = g.truncate(cap);
        let n = Series::eval_poly(&self.num, &g);
        let d = Series::eval_poly(&self.den, &g);
        n.divide(&d)
    }
}

impl<F: Field> Ring for RationalFunction<F> {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        Self::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        RationalFunction::plus(self, rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        RationalFunction::minus(self, rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        RationalFunction::times(self, rhs)
    }
    fn negate(&self) -> Self {
        RationalFunction::negate(self)
    }
    fn from_scalar(s: &Scalar) -> Self {
        Self::constant(F::from_scalar(s))
    }
    fn scale(&self, s: &Scalar) -> Self {
        RationalFunction::scale(self, s)
    }
    fn depth() -> usize {
        F::depth() + 1
    }
}

impl<F: Field> Field for RationalFunction<F> {
    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
}

impl<F: Field> RationalFunction<F> {
    /// Nonzero monomials of the numerator and denominator, e.g. `[1/16]` and `[q^4]`.
    pub fn monomial_lists(&self, var: &str) -> (Vec<String>, Vec<String>) {
        self.monomial_lists_with(var, |c| format!("{c:?}"))
    }

    /// As [`Self::monomial_lists`] with a custom coefficient renderer.
    pub fn monomial_lists_with(&self, var: &str, coeff: impl Fn(&F) -> String) -> (Vec<String>, Vec<String>) {
        let list = |p: &Polynomial<F>| -> Vec<String> {
            if p.is_zero() {
                return vec!["0".into()];
            }
            p.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| render_monomial(&coeff(c), c.is_one(), var, i as i64))
                .collect()
        };
        (list(&self.num), list(&self.den))
    }

    pub fn render(&self, var: &str) -> String {
        if self.den.is_constant() {
            return self.num.render(var);
        }
        let wrap = |s: String, p: &Polynomial<F>| {
            let single = p.coeffs().iter().filter(|c| !c.is_zero()).count() == 1;
            if single && !s.contains(['+', '/']) {
                s
            } else {
                format!("({s})")
            }
        };
        format!("{}/{}", wrap(self.num.render(var), &self.num), wrap(self.den.render(var), &self.den))
    }
}

impl<F: Field> fmt::Display for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("z"))
    }
}

impl<F: Field> fmt::Debug for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("z"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Rf = RationalFunction<Scalar>;

    fn z() -> Rf {
        Rf::var()
    }

    fn c(n: i64) -> Rf {
        Rf::constant(Scalar::int(n))
    }

    #[test]
    fn reduction_is_canonical() {
        let a = z().times(&z()).minus(&c(1)).divide(&z().minus(&c(1)).scale(&Scalar::int(2))).unwrap();
        assert_eq!(a, z().plus(&c(1)).scale(&Scalar::frac(1, 2)));
        assert!(a.den().leading().unwrap().is_one());
    }

    #[test]
    fn expansion_matches_long_division() {
        let f = z().pow(2).unwrap().plus(&z().pow(3).unwrap()).recip().unwrap();
        let s = f.expand_at(&Point::Finite(Scalar::zero()), 2).unwrap();
        let coeffs: Vec<_> = (-2..2).map(|n| s.coeff(n).unwrap()).collect();
        assert_eq!(coeffs, vec![Scalar::int(1), Scalar::int(-1), Scalar::int(1), Scalar::int(-1)]);
        assert!(matches!(f.expand_at(&Point::Finite(Scalar::zero()), -2), Err(Error::EmptyExpansion { .. })));
    }

    #[test]
    fn expansion_at_infinity() {
        let f = z().pow(3).unwrap().plus(&c(2));
        let s = f.expand_at(&Point::Infinity, 1).unwrap();
        assert_eq!(s.coeff(-3).unwrap(), Scalar::int(1));
        assert_eq!(s.coeff(0).unwrap(), Scalar::int(2));
    }

    #[test]
    fn composition_and_residue() {
        let f = c(1).divide(&z().minus(&c(2))).unwrap();
        let g = f.compose(&z().pow(2).unwrap());
        assert_eq!(g, c(1).divide(&z().pow(2).unwrap().minus(&c(2))).unwrap());
        assert_eq!(f.residue_at(&Scalar::int(2)).unwrap(), Scalar::int(1));
        assert_eq!(f.derivative().residue_at(&Scalar::int(2)).unwrap(), Scalar::zero());
    }

    #[test]
    fn monomial_lists() {
        let f = Rf::laurent_monomial(Scalar::frac(1, 16), -4);
        let (n, d) = f.monomial_lists("q");
        assert_eq!(n, vec!["1/16"]);
        assert_eq!(d, vec!["q^4"]);
    }
}
