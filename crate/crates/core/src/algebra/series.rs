use std::fmt;

use num_traits::Zero;

use super::{Field, Polynomial, Ring, Scalar};
use crate::error::{Error, Result};

/// Precision marker for series known exactly (finite Laurent polynomials).
pub const EXACT: i64 = i64::MAX / 4;

fn sat(a: i64, b: i64) -> i64 {
    if a >= EXACT {
        return EXACT;
    }
    a.saturating_add(b).min(EXACT)
}

/// Truncated Laurent series `Σ c_k s^k + O(s^prec)`.
///
/// `prec` is the exclusive upper bound of the known window; [`EXACT`] means
/// every coefficient is known (the stored ones, zero beyond). Arithmetic
/// propagates the tightest precision implied by its inputs and never reads a
/// coefficient outside the window.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series<C> {
    start: i64,
    coeffs: Vec<C>,
    prec: i64,
}

impl<C: Ring> Series<C> {
    pub fn from_coeffs(start: i64, coeffs: Vec<C>, prec: i64) -> Self {
        let mut s = Series { start, coeffs, prec: prec.min(EXACT) };
        s.normalize();
        s
    }

    /// The zero series known below `prec`.
    pub fn zero_to(prec: i64) -> Self {
        Series { start: 0, coeffs: Vec::new(), prec: prec.min(EXACT) }
    }

    pub fn exact_zero() -> Self {
        Self::zero_to(EXACT)
    }

    pub fn monomial(c: C, e: i64) -> Self {
        Self::from_coeffs(e, vec![c], EXACT)
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0)
    }

    /// The working variable `s` itself.
    pub fn var() -> Self {
        Self::monomial(C::one(), 1)
    }

    pub fn from_poly(p: &Polynomial<C>, prec: i64) -> Self {
        Self::from_coeffs(0, p.coeffs().to_vec(), prec)
    }

    fn normalize(&mut self) {
        let keep = (self.prec - self.start).clamp(0, self.coeffs.len() as i64) as usize;
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.start = 0;
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero_known(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// Valuation, or the precision when no nonzero coefficient is known.
    pub fn order_bound(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    /// Exponent one past the last stored coefficient.
    pub fn end(&self) -> i64 {
        self.start + self.coeffs.len() as i64
    }

    pub fn lead(&self) -> Option<&C> {
        self.coeffs.first()
    }

    /// Coefficient of `s^n`; errors outside the known window.
    pub fn coeff(&self, n: i64) -> Result<C> {
        if n >= self.prec {
            return Err(Error::InsufficientOrder { needed: n, known: self.prec });
        }
        Ok(self.get(n))
    }

    pub(crate) fn get(&self, n: i64) -> C {
        if n < self.start || n >= self.end() {
            C::zero()
        } else {
            self.coeffs[(n - self.start) as usize].clone()
        }
    }

    /// Nonzero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(i, c)| (self.start + i as i64, c))
    }

    /// Coefficient of `s^{-1}`.
    pub fn residue(&self) -> Result<C> {
        self.coeff(-1)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        Self::from_coeffs(self.start, self.coeffs.clone(), self.prec.min(prec))
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: i64) -> Self {
        Series {
            start: if self.coeffs.is_empty() { 0 } else { self.start + k },
            coeffs: self.coeffs.clone(),
            prec: if self.is_exact() { EXACT } else { sat(self.prec, k) },
        }
    }

    pub fn map<G: Ring>(&self, f: impl Fn(&C) -> G) -> Series<G> {
        Series::from_coeffs(self.start, self.coeffs.iter().map(f).collect(), self.prec)
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a.plus(b))
    }

    pub fn minus(&self, rhs: &Self) -> Self {
        self.combine(rhs, |a, b| a.minus(b))
    }

    fn combine(&self, rhs: &Self, op: impl Fn(&C, &C) -> C) -> Self {
        let prec = self.prec.min(rhs.prec);
        if self.coeffs.is_empty() && rhs.coeffs.is_empty() {
            return Self::zero_to(prec);
        }
        let lo = match (self.coeffs.is_empty(), rhs.coeffs.is_empty()) {
            (true, _) => rhs.start,
            (_, true) => self.start,
            _ => self.start.min(rhs.start),
        };
        let hi = self.end().max(rhs.end()).min(prec);
        let coeffs = (lo..hi.max(lo)).map(|n| op(&self.get(n), &rhs.get(n))).collect();
        Self::from_coeffs(lo, coeffs, prec)
    }

    pub fn negate(&self) -> Self {
        Series { start: self.start, coeffs: self.coeffs.iter().map(Ring::negate).collect(), prec: self.prec }
    }

    pub fn times(&self, rhs: &Self) -> Self {
        let prec = sat(self.prec, rhs.order_bound()).min(sat(rhs.prec, self.order_bound()));
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero_to(prec);
        }
        let lo = self.start + rhs.start;
        let hi = (self.end() + rhs.end() - 1).min(prec);
        if hi <= lo {
            return Self::zero_to(prec);
        }
        let len = (hi - lo) as usize;
        let mut out = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].plus(&a.times(b));
                }
            }
        }
        Self::from_coeffs(lo, out, prec)
    }

    pub fn mul_coeff(&self, c: &C) -> Self {
        Self::from_coeffs(self.start, self.coeffs.iter().map(|a| a.times(c)).collect(), self.prec)
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self::from_coeffs(self.start, self.coeffs.iter().map(|a| a.scale(s)).collect(), self.prec)
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow_nonneg(&self, e: u32) -> Self {
        let mut acc = Self::constant(C::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.times(&base);
            }
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&Scalar::int(self.start + i as i64)))
            .collect();
        let prec = if self.is_exact() { EXACT } else { self.prec - 1 };
        Self::from_coeffs(self.start - 1, coeffs, prec)
    }

    /// Term-wise antiderivative with zero constant; fails on a known nonzero
    /// `s^{-1}` coefficient or when that coefficient lies outside the window.
    pub fn integrate(&self) -> Result<Self> {
        let r = self.residue()?;
        if !r.is_zero() {
            return Err(Error::LogarithmicPrimitive(format!("{r:?}"), "expansion point".into()));
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e = self.start + i as i64 + 1;
                if e == 0 {
                    C::zero()
                } else {
                    c.scale(&Scalar::frac(1, e))
                }
            })
            .collect();
        let prec = if self.is_exact() { EXACT } else { self.prec + 1 };
        Ok(Self::from_coeffs(self.start + 1, coeffs, prec))
    }

    /// Evaluate a polynomial at this series (Horner).
    pub fn eval_poly(p: &Polynomial<C>, at: &Self) -> Self {
        p.coeffs().iter().rev().fold(Self::exact_zero(), |acc, c| acc.times(at).plus(&Self::constant(c.clone())))
    }
}

impl<C: Field> Series<C> {
    /// Multiplicative inverse. Exact inputs with more than one term have an
    /// infinite expansion and must be truncated first.
    pub fn recip(&self) -> Result<Self> {
        let v = self.valuation().ok_or_else(|| Error::NotInvertible("series is zero to known order".into()))?;
        let lead_inv = self.coeffs[0].inverse().ok_or_else(|| Error::NotInvertible("leading coefficient".into()))?;
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(Self::monomial(lead_inv, -v));
            }
            return Err(Error::InfiniteExpansion);
        }
        let rel = (self.prec - v) as usize;
        let u: Vec<C> = self.coeffs.iter().map(|c| c.times(&lead_inv)).collect();
        let mut b: Vec<C> = Vec::with_capacity(rel);
        for n in 0..rel {
            if n == 0 {
                b.push(C::one());
                continue;
            }
            let mut acc = C::zero();
            for k in 1..=n.min(u.len() - 1) {
                if !u[k].is_zero() {
                    acc = acc.plus(&u[k].times(&b[n - k]));
                }
            }
            b.push(acc.negate());
        }
        let b = b.into_iter().map(|c| c.times(&lead_inv)).collect();
        Ok(Self::from_coeffs(-v, b, self.prec - 2 * v))
    }

    pub fn divide(&self, rhs: &Self) -> Result<Self> {
        Ok(self.times(&rhs.recip()?))
    }

    pub fn powi(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow_nonneg(e as u32))
        } else {
            Ok(self.recip()?.pow_nonneg((-e) as u32))
        }
    }

    /// `self ∘ inner`. Requires `inner` to have positive valuation unless
    /// `self` is an exact polynomial.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let vg = inner.valuation();
        let poly_exact = self.is_exact() && (self.start >= 0 || self.coeffs.is_empty());
        let vg = match vg {
            Some(v) if v >= 1 => v,
            _ if poly_exact => 0,
            Some(_) => return Err(Error::NotInvertible("inner series of composition must vanish at 0".into())),
            None => {
                if inner.prec >= 1 {
                    return Err(Error::InsufficientOrder { needed: inner.prec, known: inner.prec });
                }
                return Err(Error::NotInvertible("inner series has no known terms".into()));
            }
        };
        if self.coeffs.is_empty() {
            return Ok(Self::zero_to(if self.is_exact() { EXACT } else { self.prec.saturating_mul(vg).min(EXACT) }));
        }
        let tail = if self.is_exact() { EXACT } else { sat(self.prec.saturating_mul(vg).min(EXACT), 0) };
        let mut acc = Self::zero_to(tail);
        let mut power = if self.start >= 0 { inner.pow_nonneg(self.start as u32) } else { inner.recip()?.pow_nonneg((-self.start) as u32) };
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.times(inner);
            }
            if vg > 0 && power.order_bound() >= acc.prec {
                break;
            }
            if !c.is_zero() {
                acc = acc.plus(&power.mul_coeff(c));
            }
        }
        Ok(acc)
    }

    /// Compositional inverse of a series of valuation exactly 1.
    pub fn reverse(&self) -> Result<Self> {
        if self.valuation() != Some(1) {
            return Err(Error::NotInvertible("reversion needs valuation exactly 1".into()));
        }
        if self.is_exact() && self.coeffs.len() > 1 {
            return Err(Error::InfiniteExpansion);
        }
        let c_inv = self.coeffs[0].inverse().ok_or_else(|| Error::NotInvertible("leading coefficient".into()))?;
        if self.is_exact() {
            return Ok(Self::monomial(c_inv, 1));
        }
        let p = self.prec;
        let mut g: Vec<C> = vec![c_inv.clone()];
        for n in 2..p {
            let cur = Self::from_coeffs(1, g.clone(), p);
            let comp = self.compose(&cur)?;
            let err = comp.coeff(n)?;
            g.push(err.times(&c_inv).negate());
        }
        Ok(Self::from_coeffs(1, g, p))
    }

    /// `self^(num/den)` for a series whose leading term is `1·s^0`.
    pub fn pow_ratio(&self, num: i64, den: i64) -> Result<Self> {
        if self.valuation() != Some(0) || !self.coeffs[0].is_one() {
            return Err(Error::NotInvertible("fractional power needs leading term 1".into()));
        }
        if self.is_exact() && self.coeffs.len() > 1 {
            return Err(Error::InfiniteExpansion);
        }
        let r = Scalar::frac(num, den);
        let n_terms = if self.is_exact() { 1 } else { self.prec.max(0) as usize };
        // h = f^r satisfies f·h' = r·f'·h, giving h_n = (1/n)·Σ_k ((r+1)k − n) f_k h_{n−k}.
        let mut h: Vec<C> = Vec::with_capacity(n_terms);
        for n in 0..n_terms {
            if n == 0 {
                h.push(C::one());
                continue;
            }
            let mut acc = C::zero();
            for k in 1..=n.min(self.coeffs.len() - 1) {
                let w = r.plus(&Scalar::int(1)).times(&Scalar::int(k as i64)).minus(&Scalar::int(n as i64));
                if !w.is_zero() && !self.coeffs[k].is_zero() {
                    acc = acc.plus(&self.coeffs[k].times(&h[n - k]).scale(&w));
                }
            }
            h.push(acc.scale(&Scalar::frac(1, n as i64)));
        }
        Ok(Self::from_coeffs(0, h, self.prec))
    }
}

impl<C: Ring> Ring for Series<C> {
    fn zero() -> Self {
        Self::exact_zero()
    }
    fn one() -> Self {
        Self::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn plus(&self, rhs: &Self) -> Self {
        Series::plus(self, rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        Series::minus(self, rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        Series::times(self, rhs)
    }
    fn negate(&self) -> Self {
        Series::negate(self)
    }
    fn from_scalar(s: &Scalar) -> Self {
        Self::constant(C::from_scalar(s))
    }
    fn scale(&self, s: &Scalar) -> Self {
        Series::scale(self, s)
    }
    fn depth() -> usize {
        C::depth() + 1
    }
}

impl<C: Field> Field for Series<C> {
    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
}

impl<C: Ring + fmt::Debug> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})*s^{e}")?;
        }
        if first {
            write!(f, "0")?;
        }
        if !self.is_exact() {
            write!(f, " + O(s^{})", self.prec)?;
        }
        Ok(())
    }
}

impl Series<Scalar> {
    /// True when every known coefficient has zero θ-coordinate.
    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().all(|c| c.theta_part().is_zero())
    }
}
