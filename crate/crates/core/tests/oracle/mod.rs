//! Hand residue oracle for the lowest correlators, written directly from the
//! residue formula with plain truncated power series in the integration
//! variable t. Shared by the recursion and acceptance tests.

use toprec::algebra::{Field, Ring, Scalar};

fn s(n: i64, d: i64) -> Scalar {
    Scalar::frac(n, d)
}

/// Truncated power series in t starting at t^0, for the hand residue oracle.
#[derive(Clone)]
struct Pow(Vec<Scalar>);

const N: usize = 8;

impl Pow {
    /// 1/(a − c·t)
    fn geometric(a: &Scalar, c: &Scalar) -> Pow {
        let ai = a.inverse().unwrap();
        let r = c.times(&ai);
        let mut out = Vec::with_capacity(N);
        let mut term = ai;
        for _ in 0..N {
            out.push(term.clone());
            term = term.times(&r);
        }
        Pow(out)
    }

    fn constant(a: &Scalar) -> Pow {
        let mut v = vec![Scalar::zero(); N];
        v[0] = a.clone();
        Pow(v)
    }

    fn mul(&self, o: &Pow) -> Pow {
        let mut v = vec![Scalar::zero(); N];
        for i in 0..N {
            for j in 0..N - i {
                v[i + j] = v[i + j].plus(&self.0[i].times(&o.0[j]));
            }
        }
        Pow(v)
    }

    fn add(&self, o: &Pow) -> Pow {
        Pow(self.0.iter().zip(&o.0).map(|(a, b)| a.plus(b)).collect())
    }

    fn scale(&self, c: &Scalar) -> Pow {
        Pow(self.0.iter().map(|a| a.times(c)).collect())
    }
}

/// dS_{t,o}(q) = 1/(q − t) − 1/(q − o) as a series in t.
fn ds(q: &Scalar, o: &Scalar) -> Pow {
    Pow::geometric(q, &Scalar::one()).add(&Pow::constant(&q.minus(o).inverse().unwrap().negate()))
}

/// B(u·t, p)·u, the Bergman kernel with one argument moved by the linear deck map t ↦ u·t.
fn bergman_moved(u: &Scalar, p: &Scalar) -> Pow {
    let g = Pow::geometric(p, u);
    g.mul(&g).scale(u)
}

/// Airy: w_3^(0)(q, p1, p2) = −Res_{t→0} dS_{t,o}(q)·W₂/(4t² dt).
pub fn airy_w30(q: &Scalar, p1: &Scalar, p2: &Scalar) -> Scalar {
    let o = Scalar::one();
    let plus = Scalar::one();
    let minus = Scalar::int(-1);
    let w2 = bergman_moved(&plus, p1)
        .mul(&bergman_moved(&minus, p2))
        .add(&bergman_moved(&minus, p1).mul(&bergman_moved(&plus, p2)));
    let integrand = ds(q, &o).mul(&w2);
    // [t^{-1}] of integrand/(4t²) is [t^1] of integrand over 4
    integrand.0[1].times(&s(1, 4)).negate()
}

/// Airy: W₂(t, −t) = B(t, −t)·(−1) = −1/(4t²), so w_1^(1)(q) = −[t^3](dS·(−1/16)).
pub fn airy_w11(q: &Scalar) -> Scalar {
    ds(q, &Scalar::one()).0[3].times(&s(1, 16))
}

/// Eisenstein: only the W₂ terms contribute to w_1^(1); ω_j = 3(1 − θ^j) + (3/2)(1 − θ^j)t³.
pub fn eisenstein_w11(q: &Scalar) -> Scalar {
    let o = Scalar::one();
    let mut total = Scalar::zero();
    for j in 1..=2 {
        let u = Scalar::theta_pow(j);
        let one_minus = Scalar::one().minus(&u);
        // B(t, u t)·u = u/((1 − u)² t²)
        let b = u.times(&one_minus.times(&one_minus).inverse().unwrap());
        let a = Scalar::int(3).times(&one_minus);
        let c = s(3, 2).times(&one_minus).negate();
        // 1/ω_j as 1/(a − c t³): only powers t^{3m}
        let inv: Vec<Scalar> = (0..N)
            .map(|i| if i % 3 == 0 { Pow::geometric(&a, &c).0[i / 3].clone() } else { Scalar::zero() })
            .collect();
        let integrand = ds(q, &o).mul(&Pow(inv)).scale(&b);
        total = total.minus(&integrand.0[1]);
    }
    total
}

