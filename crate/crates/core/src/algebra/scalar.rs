//! Exact scalars in ℚ(θ), θ² + θ + 1 = 0.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Field, Ring};

/// Which coefficient field a curve is declared over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    /// Plain rationals; every scalar must have zero θ-coordinate.
    Rational,
    /// ℚ(θ) with θ² + θ + 1 = 0.
    Eisenstein,
}

impl FieldSpec {
    pub fn contains(&self, s: &Scalar) -> bool {
        match self {
            FieldSpec::Rational => s.is_rational(),
            FieldSpec::Eisenstein => true,
        }
    }

    pub fn canonical(&self) -> &'static str {
        match self {
            FieldSpec::Rational => "Q",
            FieldSpec::Eisenstein => "Q(w); w^2+w+1=0",
        }
    }
}

/// The element `a + b·θ`. Coordinates are kept reduced by `BigRational`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
}

impl Scalar {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Scalar { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        Scalar { a, b: BigRational::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// The primitive cube root of unity θ.
    pub fn theta() -> Self {
        Scalar { a: BigRational::zero(), b: BigRational::one() }
    }

    /// θ^k for any integer k (θ³ = 1).
    pub fn theta_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => Self::int(1),
            1 => Self::theta(),
            _ => Self::new(-BigRational::one(), -BigRational::one()),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.a
    }

    /// θ-coordinate.
    pub fn theta_part(&self) -> &BigRational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.a.clone())
    }

    /// Galois conjugate θ ↦ θ².
    pub fn conj(&self) -> Self {
        Scalar { a: &self.a - &self.b, b: -self.b.clone() }
    }

    /// Field norm to ℚ: a² − ab + b².
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.a * &self.b + &self.b * &self.b
    }

    pub fn pow(&self, e: i64) -> Self {
        if e < 0 {
            return self.inverse().expect("division by zero").pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Scalar::int(1);
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.times(&base);
            }
            base = base.times(&base);
            e >>= 1;
        }
        acc
    }

    /// Decimal approximation `(re, im)` with θ = −1/2 + i·√3/2.
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        (a - b / 2.0, b * 3f64.sqrt() / 2.0)
    }

    /// Render with an explicit θ-coordinate, e.g. `1/9+0*w`.
    pub fn render_extension(&self) -> String {
        format!("{}{}{}*w", fmt_q(&self.a), if self.b.is_negative() { "-" } else { "+" }, fmt_q(&self.b.abs()))
    }

    pub fn render(&self, field: FieldSpec) -> String {
        match field {
            FieldSpec::Rational if self.is_rational() => fmt_q(&self.a),
            _ => self.render_extension(),
        }
    }
}

pub(crate) fn fmt_q(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Ring for Scalar {
    fn zero() -> Self {
        Scalar::default()
    }
    fn one() -> Self {
        Scalar::int(1)
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn plus(&self, rhs: &Self) -> Self {
        Scalar { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
    fn minus(&self, rhs: &Self) -> Self {
        Scalar { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
    fn times(&self, rhs: &Self) -> Self {
        if self.b.is_zero() && rhs.b.is_zero() {
            return Scalar::rational(&self.a * &rhs.a);
        }
        // (a + bθ)(c + dθ) = ac − bd + (ad + bc − bd)θ
        let bd = &self.b * &rhs.b;
        Scalar {
            a: &self.a * &rhs.a - &bd,
            b: &self.a * &rhs.b + &self.b * &rhs.a - bd,
        }
    }
    fn negate(&self) -> Self {
        Scalar { a: -self.a.clone(), b: -self.b.clone() }
    }
    fn from_scalar(s: &Scalar) -> Self {
        s.clone()
    }
    fn scale(&self, s: &Scalar) -> Self {
        self.times(s)
    }
}

impl Field for Scalar {
    fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.b.is_zero() {
            return Some(Scalar::rational(self.a.recip()));
        }
        let n = self.norm();
        let c = self.conj();
        Some(Scalar { a: c.a / &n, b: c.b / n })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", fmt_q(&self.a))
        } else {
            write!(f, "{}", self.render_extension())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Parses `p`, `p/q`, or `a+b*w` forms as printed by [`Scalar::render_extension`].
impl FromStr for Scalar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let parse_q = |t: &str| -> Result<BigRational, String> {
            let (n, d) = match t.split_once('/') {
                Some((n, d)) => (n, d),
                None => (t, "1"),
            };
            let n: BigInt = n.parse().map_err(|_| format!("bad rational `{t}`"))?;
            let d: BigInt = d.parse().map_err(|_| format!("bad rational `{t}`"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in `{t}`"));
            }
            Ok(BigRational::new(n, d))
        };
        if let Some(body) = s.strip_suffix("*w") {
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(_, c)| c == '+' || c == '-')
                .map(|(i, _)| i)
                .last()
                .ok_or_else(|| format!("bad scalar `{s}`"))?;
            let (a, b) = body.split_at(split);
            let b = b.strip_prefix('+').unwrap_or(b);
            return Ok(Scalar::new(parse_q(a)?, parse_q(b)?));
        }
        Ok(Scalar::rational(parse_q(&s)?))
    }
}

macro_rules! forward_ops {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$imp(rhs)
            }
        }
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$imp(&rhs)
            }
        }
    };
}

forward_ops!(Add, add, plus);
forward_ops!(Sub, sub, minus);
forward_ops!(Mul, mul, times);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.times(&rhs.inverse().expect("division by zero"))
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.negate()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::rational(q)
    }
}


impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
