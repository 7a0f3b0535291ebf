use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::{Field, Ring, Scalar};
use crate::curve::Rf;
use crate::error::{Error, Result};

/// The one-form `dz/(z − point)^order` in a single slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis {
    pub point: Scalar,
    pub order: u32,
}

impl Basis {
    pub fn new(point: Scalar, order: u32) -> Self {
        Basis { point, order }
    }

    pub fn to_rational(&self) -> Rf {
        Rf::pole(Scalar::one(), &self.point, self.order)
    }
}

/// Per-slot basis choices of one product term, sorted by slot.
pub type SlotKey = Vec<(u16, Basis)>;

/// Finite linear combination of products of [`Basis`] forms in distinct
/// slots. This is the storage form of multi-differentials whose poles lie at
/// finitely many known points, such as every correlator with χ < 2.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Tensor {
    terms: BTreeMap<SlotKey, Scalar>,
}

fn merge_keys(a: &SlotKey, b: &SlotKey) -> SlotKey {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else {
            assert!(i >= a.len() || a[i].0 != b[j].0, "tensor product over a shared slot {}", b[j].0);
            out.push(b[j].clone());
            j += 1;
        }
    }
    out
}

impl Tensor {
    pub fn scalar(c: Scalar) -> Self {
        let mut t = Tensor::default();
        t.add_term(Vec::new(), c);
        t
    }

    pub fn single(slot: u16, basis: Basis, c: Scalar) -> Self {
        let mut t = Tensor::default();
        t.add_term(vec![(slot, basis)], c);
        t
    }

    pub fn add_term(&mut self, key: SlotKey, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().plus(&c);
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_assign(&mut self, rhs: &Tensor) {
        for (k, c) in &rhs.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SlotKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Slots carrying a basis form in some term.
    pub fn slots(&self) -> BTreeSet<u16> {
        self.terms.keys().flat_map(|k| k.iter().map(|(s, _)| *s)).collect()
    }

    /// Scalar value if the tensor has no symbolic slots.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn relabel(&self, f: impl Fn(u16) -> u16) -> Tensor {
        let mut out = Tensor::default();
        for (k, c) in &self.terms {
            let mut nk: SlotKey = k.iter().map(|(s, b)| (f(*s), b.clone())).collect();
            nk.sort_by(|a, b| a.0.cmp(&b.0));
            out.add_term(nk, c.clone());
        }
        out
    }

    /// Replace the form in `slot` by the scalar `f(basis)`.
    pub fn contract(&self, slot: u16, f: &mut impl FnMut(&Basis) -> Result<Scalar>) -> Result<Tensor> {
        let mut cache: BTreeMap<Basis, Scalar> = BTreeMap::new();
        let mut out = Tensor::default();
        for (k, c) in &self.terms {
            let pos = k
                .iter()
                .position(|(s, _)| *s == slot)
                .ok_or_else(|| Error::Contract(format!("term without a form in slot {slot}")))?;
            let b = &k[pos].1;
            let v = match cache.get(b) {
                Some(v) => v.clone(),
                None => {
                    let v = f(b)?;
                    cache.insert(b.clone(), v.clone());
                    v
                }
            };
            let mut nk = k.clone();
            nk.remove(pos);
            out.add_term(nk, c.times(&v));
        }
        Ok(out)
    }

    /// Evaluate the coefficient of dz in `slot` at a concrete point.
    pub fn evaluate_slot(&self, slot: u16, p: &Scalar) -> Result<Tensor> {
        self.contract(slot, &mut |b| {
            let d = p.minus(&b.point);
            d.pow(b.order as i64)
                .inverse()
                .ok_or_else(|| Error::Pole(format!("evaluation at the pole {p}")))
        })
    }

    /// Rational function of the single symbolic slot `slot`.
    pub fn to_rational(&self, slot: u16) -> Result<Rf> {
        let mut by_point: BTreeMap<(Scalar, u32), Scalar> = BTreeMap::new();
        for (k, c) in &self.terms {
            match k.as_slice() {
                [(s, b)] if *s == slot => {
                    let e = by_point.entry((b.point.clone(), b.order)).or_insert_with(Scalar::zero);
                    *e = e.plus(c);
                }
                [] => return Err(Error::Contract("constant term in a one-form".into())),
                _ => return Err(Error::Contract(format!("tensor has symbolic slots besides {slot}"))),
            }
        }
        // Sum partial fractions point by point over a common denominator.
        let mut points: BTreeMap<Scalar, Vec<(u32, Scalar)>> = BTreeMap::new();
        for ((p, d), c) in by_point {
            points.entry(p).or_default().push((d, c));
        }
        let mut acc = Rf::zero();
        for (p, list) in points {
            let m = list.iter().map(|(d, _)| *d).max().unwrap_or(0);
            // Σ c_d/(z−p)^d = Σ c_d (z−p)^{m−d} / (z−p)^m
            let lin = crate::algebra::Polynomial::linear_root(&p);
            let mut num = crate::algebra::Polynomial::zero();
            for (d, c) in list {
                num = num.plus(&lin.pow(m - d).mul_coeff(&c));
            }
            acc = acc.plus(&Rf::new(num, lin.pow(m)).expect("nonzero"));
        }
        Ok(acc)
    }

    pub fn scale_by(&self, s: &Scalar) -> Tensor {
        if s.is_zero() {
            return Tensor::default();
        }
        Tensor { terms: self.terms.iter().map(|(k, c)| (k.clone(), c.times(s))).collect() }
    }

    /// True when every coefficient has zero θ-coordinate.
    pub fn is_rational(&self) -> bool {
        self.terms.values().all(Scalar::is_rational)
    }
}

impl Ring for Tensor {
    fn zero() -> Self {
        Tensor::default()
    }
    fn one() -> Self {
        Tensor::scalar(Scalar::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negate())
    }
    fn times(&self, rhs: &Self) -> Self {
        if let Some(s) = rhs.terms.get(&Vec::new()).filter(|_| rhs.terms.len() == 1) {
            return self.scale_by(s);
        }
        if let Some(s) = self.terms.get(&Vec::new()).filter(|_| self.terms.len() == 1) {
            return rhs.scale_by(s);
        }
        let mut out = Tensor::default();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(merge_keys(ka, kb), ca.times(cb));
            }
        }
        out
    }
    fn negate(&self) -> Self {
        Tensor { terms: self.terms.iter().map(|(k, c)| (k.clone(), c.negate())).collect() }
    }
    fn from_scalar(s: &Scalar) -> Self {
        Tensor::scalar(s.clone())
    }
    fn scale(&self, s: &Scalar) -> Self {
        self.scale_by(s)
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let forms: Vec<String> =
                    k.iter().map(|(s, b)| format!("d{s}/({s}-{})^{}", b.point, b.order)).collect();
                if forms.is_empty() {
                    format!("{c}")
                } else {
                    format!("({c})*{}", forms.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_merge_slots() {
        let a = Tensor::single(0, Basis::new(Scalar::zero(), 2), Scalar::int(2));
        let b = Tensor::single(1, Basis::new(Scalar::int(1), 1), Scalar::int(3));
        let p = a.times(&b);
        assert_eq!(p.len(), 1);
        assert_eq!(p.slots(), [0, 1].into_iter().collect());
        let e = p.evaluate_slot(1, &Scalar::int(3)).unwrap();
        assert_eq!(e.to_rational(0).unwrap(), Rf::laurent_monomial(Scalar::int(3), -2));
    }
}
