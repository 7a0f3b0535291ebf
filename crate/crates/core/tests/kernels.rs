use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use toprec::algebra::{Field, Point, Ring, Scalar, Series};
use toprec::curve::{Rf, SpectralCurve};
use toprec::kernels::*;
use toprec::Error;

fn curve(name: &str) -> SpectralCurve {
    SpectralCurve::from_path(format!("{}/../../curves/{name}.curve", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-30i64..30, 1i64..9, -30i64..30, 1i64..9).prop_map(|(a, b, c, d)| {
        Scalar::new(BigRational::new(BigInt::from(a), BigInt::from(b)), BigRational::new(BigInt::from(c), BigInt::from(d)))
    })
}

proptest! {
    #[test]
    fn bergman_is_symmetric(a in scalar(), b in scalar()) {
        prop_assume!(a != b);
        prop_assert_eq!(bergman_points(&a, &b).unwrap(), bergman_points(&b, &a).unwrap());
    }

    #[test]
    fn sheet_sum_of_bergman_is_the_pullback_kernel(q in scalar(), p in scalar()) {
        for name in ["airy", "eisenstein", "gaussian"] {
            let c = curve(name);
            let (Ok(xq), Ok(xp)) = (c.x().eval(&q), c.x().eval(&p)) else { continue };
            prop_assume!(xq != xp);
            let mut sum = Scalar::zero();
            for s in c.sheets() {
                let sq = s.eval(&q).unwrap();
                sum = sum.plus(&bergman_points(&sq, &p).unwrap().times(&s.derivative().eval(&q).unwrap()));
            }
            let dxq = c.dx().eval(&q).unwrap();
            let dxp = c.dx().eval(&p).unwrap();
            let d = xq.minus(&xp);
            let direct = dxq.times(&dxp).times(&d.times(&d).inverse().unwrap());
            prop_assert_eq!(&sum, &direct);
            let k = sheet_kernel(&c).eval(&Rf::constant(q.clone())).unwrap().eval(&p).unwrap();
            prop_assert_eq!(k, direct);
        }
    }
}

#[test]
fn bergman_symbolic_has_a_double_pole_on_the_diagonal() {
    let b = bergman_symbolic();
    assert_eq!(b.degree(), 2);
    let at = b.payload.eval(&Rf::constant(Scalar::int(5))).unwrap();
    assert_eq!(at.eval(&Scalar::int(3)).unwrap(), Scalar::frac(1, 4));
    assert_eq!(at.valuation_at(&Scalar::int(5)), -2);
}

#[test]
fn third_kind_reproduces_residue_free_forms() {
    // f(t) = 1/(t − 2)² + 3/(t + 1)³ − 1/t²: poles at 2, −1, 0 with no residues
    let f = Rf::pole(Scalar::one(), &Scalar::int(2), 2)
        .plus(&Rf::pole(Scalar::int(3), &Scalar::int(-1), 3))
        .minus(&Rf::laurent_monomial(Scalar::one(), -2));
    let o = Scalar::int(7);
    let ds = third_kind_symbolic(&o);
    for p in [3, 5, -4, 11, 13] {
        let p = Scalar::frac(p, 2);
        // dS_{t,o}(p) as a function of t
        let kernel = ds.payload.eval(&Rf::constant(p.clone())).unwrap();
        let integrand = kernel.times(&f);
        let mut total = Scalar::zero();
        for a in [2, -1, 0] {
            total = total.plus(&integrand.residue_at(&Scalar::int(a)).unwrap());
        }
        assert_eq!(total, f.eval(&p).unwrap(), "p = {p}");
    }
}

#[test]
fn third_kind_symbolic_agrees_with_points() {
    let o = Scalar::int(1);
    let t = Scalar::int(3);
    let sym = third_kind_symbolic(&o).payload.eval(&Rf::constant(Scalar::int(4))).unwrap().eval(&t).unwrap();
    let pts = third_kind(&t, &o).unwrap().payload.eval(&Scalar::int(4)).unwrap();
    assert_eq!(sym, pts);
    assert_eq!(pts, Scalar::frac(2, 3));
}

#[test]
fn recursion_denominator_at_simple_branch_point() {
    let c = curve("airy");
    let w = omega_j(&c, 0, 1, 6).unwrap();
    assert_eq!(w.valuation(), Some(2));
    assert_eq!(w.coeff(2).unwrap(), Scalar::int(4));
    for k in 3..6 {
        assert!(w.coeff(k).unwrap().is_zero());
    }
}

#[test]
fn recursion_denominator_at_double_branch_point() {
    let c = curve("eisenstein");
    let theta = Scalar::theta();
    let one_minus = Scalar::one().minus(&theta);
    for j in 1..=2 {
        let w = omega_j(&c, 0, j, 6).unwrap();
        let tj = Scalar::theta_pow(j as i64);
        // (y(s) − y(θ^j s))·3s² with y = s⁻² + s/2
        let c0 = Scalar::int(3).times(&Scalar::one().minus(&tj.pow(-2)));
        let c3 = Scalar::frac(3, 2).times(&Scalar::one().minus(&tj));
        assert_eq!(w.valuation(), Some(0));
        assert_eq!(w.coeff(0).unwrap(), c0);
        assert_eq!(w.coeff(3).unwrap(), c3);
        assert!(w.coeff(1).unwrap().is_zero());
    }
    assert_eq!(omega_j(&c, 0, 1, 4).unwrap().coeff(0).unwrap(), Scalar::int(3).times(&one_minus));
}

#[test]
fn local_primitives() {
    let airy = curve("airy");
    let psi = psi_germ(&airy, &Scalar::zero(), 6).unwrap();
    assert_eq!(psi.coeff(3).unwrap(), Scalar::frac(2, 3));
    assert_eq!(psi.terms().count(), 1);

    let eis = curve("eisenstein");
    let psi = psi_germ(&eis, &Scalar::zero(), 6).unwrap();
    assert_eq!(psi.coeff(1).unwrap(), Scalar::int(3));
    assert_eq!(psi.coeff(4).unwrap(), Scalar::frac(3, 8));
    assert_eq!(psi.terms().count(), 2);

    let log = SpectralCurve::parse("field = \"Q\"\nx = \"z\"\ny = \"1/z\"\nsheets = [\"z\"]\nbasepoint = \"1\"\n").unwrap();
    assert!(matches!(psi_germ(&log, &Scalar::zero(), 4), Err(Error::LogarithmicPrimitive(..))));
}

#[test]
fn barred_bergman_on_airy() {
    let c = curve("airy");
    let b = bergman_symbolic();
    let barred = bar_shift(&c, &b, BarDirection::ToBarred);
    // 1/(q − p)² − 4qp/(q² − p²)² = 1/(q + p)²
    let q = toprec::kernels::Rf2::var();
    let p = toprec::kernels::Rf2::constant(Rf::var());
    assert_eq!(barred.payload, q.plus(&p).pow(-2).unwrap());
    assert_eq!(bar_shift(&c, &barred, BarDirection::ToUnbarred), b);
}

#[test]
fn bergman_series_matches_direct_expansion() {
    let alpha = Scalar::int(2);
    let p = Scalar::int(5);
    let s = bergman_series_point(&SeriesPoint::local(&alpha), &p, 6).unwrap();
    let direct = Rf::pole(Scalar::one(), &p, 2).expand_at(&Point::Finite(alpha.clone()), 6).unwrap();
    for k in 0..6 {
        assert_eq!(s.coeff(k).unwrap(), direct.coeff(k).unwrap());
    }
    // B(α + s, α − s) = 1/(2s)²·(−1)
    let minus = SeriesPoint::new(Series::constant(alpha.clone()).minus(&Series::var()));
    let b = bergman_series(&SeriesPoint::local(&alpha), &minus, 4).unwrap();
    assert_eq!(b.coeff(-2).unwrap(), Scalar::frac(-1, 4));
    assert!(b.coeff(0).unwrap().is_zero());
}

#[test]
fn pullback_along_sheet() {
    // f(−z)·(−1) for f = z²
    let f = Rf::laurent_monomial(Scalar::one(), 2);
    let sigma = Rf::var().negate();
    assert_eq!(pullback(&f, &sigma), Rf::laurent_monomial(Scalar::int(-1), 2));
    assert_eq!(lift_outer(&f).eval(&Rf::constant(Scalar::int(3))).unwrap(), Rf::constant(Scalar::int(9)));
}
