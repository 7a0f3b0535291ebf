use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use toprec::algebra::{Field, Ring, Scalar};
use toprec::curve::{CurveSpec, Rf, SpectralCurve};
use toprec::identities::*;
use toprec::recursion::{Basis, CorrelatorKey, Engine, EngineConfig, Tensor};

fn path(name: &str) -> String {
    format!("{}/../../curves/{name}.curve", env!("CARGO_MANIFEST_DIR"))
}

fn curve(name: &str) -> SpectralCurve {
    SpectralCurve::from_path(path(name)).unwrap()
}

fn engine(name: &str) -> Engine {
    Engine::with_defaults(curve(name))
}

fn s(n: i64, d: i64) -> Scalar {
    Scalar::frac(n, d)
}

fn assert_pass(r: &CheckReport) {
    assert!(r.passed && !r.skipped, "{}: {} {:?}", r.name, r.detail, r.mismatch);
}

#[test]
fn h_on_basis_forms() {
    // Ψ = (2/3)z³ on Airy and 3z + (3/8)z⁴ on Eisenstein, both at 0
    let airy = curve("airy");
    let eis = curve("eisenstein");
    let basis = |d| Tensor::single(0, Basis::new(Scalar::zero(), d), Scalar::one());
    assert_eq!(h_apply(&airy, &basis(2)).unwrap(), Scalar::zero());
    assert_eq!(h_apply(&airy, &basis(4)).unwrap(), s(-2, 3));
    assert_eq!(h_apply(&eis, &basis(2)).unwrap(), Scalar::int(-3));
    assert_eq!(h_apply(&eis, &basis(5)).unwrap(), s(-3, 8));
    assert!(h_apply(&eis, &basis(1)).is_err());
}

#[test]
fn h_of_w11() {
    // w_1^(1) = dq/(9q²) on Eisenstein: H = −3/9
    let e = engine("eisenstein");
    let w = e.correlator(&CorrelatorKey::symbolic(1, 1)).unwrap();
    assert_eq!(h_apply(e.curve(), &w.tensor).unwrap(), s(-1, 3));
    // w_1^(1) = dq/(16q⁴) on Airy: H = −(2/3)/16
    let e = engine("airy");
    let w = e.correlator(&CorrelatorKey::symbolic(1, 1)).unwrap();
    assert_eq!(h_apply(e.curve(), &w.tensor).unwrap(), s(-1, 24));
}

#[test]
fn h_of_bergman_kernel() {
    for name in ["airy", "eisenstein", "eisenstein_shifted", "gaussian"] {
        assert_pass(&check_h_bergman(&curve(name)).unwrap());
    }
    // spelled out on Airy: −y dx = −2q²
    let lhs = h_apply_rational(&curve("airy"), &toprec::kernels::bergman_symbolic().payload, &[Rf::var()]).unwrap();
    assert_eq!(lhs, Rf::laurent_monomial(Scalar::int(-2), 2));
}

#[test]
fn moduli_of_reference_curves() {
    let m = moduli(&curve("airy")).unwrap();
    assert_eq!(m.len(), 1);
    assert_eq!((m[0].point.as_str(), m[0].k, m[0].t.clone()), ("inf", 3, Scalar::int(-2)));

    let mut m: Vec<(String, u32, Scalar)> =
        moduli(&curve("eisenstein")).unwrap().into_iter().map(|m| (m.point, m.k, m.t)).collect();
    m.sort_by_key(|x| x.1);
    assert_eq!(m, vec![("inf".into(), 1, Scalar::int(-3)), ("inf".into(), 4, s(-3, 2))]);

    // y dx = (z − 2/z + 1/z³)dz on the Gaussian curve: a logarithmic modulus at 0
    let m = moduli(&curve("gaussian")).unwrap();
    assert!(m.iter().any(|m| m.point == "0" && m.k == 0 && m.t == Scalar::int(-2)));
}

#[test]
fn j_on_exact_forms_away_from_poles() {
    // ψ = d(1/z²) is regular at ∞ with a zero of order 3 in ζ
    let c = curve("eisenstein");
    let psi = Tensor::single(0, Basis::new(Scalar::zero(), 3), Scalar::int(-2));
    for m in moduli(&c).unwrap() {
        assert!(j_apply(&c, &m, &psi).unwrap().is_zero());
    }
    let log = Tensor::single(0, Basis::new(Scalar::int(2), 1), Scalar::one());
    let m0 = moduli(&curve("gaussian")).unwrap().into_iter().find(|m| m.k == 0).unwrap();
    assert!(matches!(j_apply(&curve("gaussian"), &m0, &log), Err(toprec::Error::Regularization(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moduli_form_of_h_matches_residue_form(n in -9i64..9, d in 1i64..4, order in 2u32..6, which in 0usize..3) {
        let name = ["airy", "eisenstein", "gaussian"][which];
        let c = curve(name);
        let a = s(n, d);
        prop_assume!(c.x().eval(&a).is_ok() && c.y().eval(&a).is_ok());
        prop_assume!(c.ydx().eval(&a).is_ok() && c.basepoint() != &a);
        let psi = Tensor::single(0, Basis::new(a, order), Scalar::one());
        prop_assert_eq!(h_moduli(&c, &psi).unwrap(), h_apply(&c, &psi).unwrap());
    }
}

/// Bernoulli numbers B_0..B_n from the standard recurrence.
fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    let binom = |n: usize, k: usize| -> BigInt { (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1)) };
    for m in 0..=n {
        if m == 0 {
            b.push(BigRational::from_integer(1.into()));
            continue;
        }
        let sum: BigRational = (0..m).map(|k| BigRational::from_integer(binom(m + 1, k)) * &b[k]).sum();
        b.push(-sum / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

#[test]
fn gaussian_free_energies_match_bernoulli_numbers() {
    // y = √(x² − 4): F^(h) = −B_{2h}/(2h(2h − 2))·2^{2−2h} in this sign convention
    let e = engine("gaussian");
    let b = bernoulli(6);
    for h in [2usize, 3] {
        let bh = Scalar::rational(b[2 * h].clone());
        let denom = Scalar::int((2 * h * (2 * h - 2)) as i64);
        let expected = bh.negate().times(&denom.inverse().unwrap()).times(&Scalar::int(2).pow(2 - 2 * h as i64));
        let f = free_energy(&e, h).unwrap();
        assert_eq!(f.value, expected, "F^({h})");
        let split = f.contributions.iter().fold(Scalar::zero(), |a, c| a.plus(c));
        assert_eq!(split, f.value);
    }
    assert_eq!(free_energy(&e, 2).unwrap().value, s(1, 960));
}

#[test]
fn free_energy_vanishes_on_symmetric_curves() {
    assert!(free_energy(&engine("airy"), 2).unwrap().value.is_zero());
    assert!(free_energy(&engine("eisenstein"), 2).unwrap().value.is_zero());
    assert!(free_energy(&engine("airy"), 1).is_err());
}

#[test]
fn moduli_equivalence_and_scaling() {
    for name in ["airy", "eisenstein", "gaussian"] {
        let e = engine(name);
        for h in [1, 2] {
            assert_pass(&check_hequiv(&e, h).unwrap());
        }
    }
    let spec = CurveSpec::from_path(path("gaussian")).unwrap();
    assert_pass(&check_scaling(&spec, 2, &Scalar::int(2), &EngineConfig::default()).unwrap());
    let spec = CurveSpec::from_path(path("eisenstein")).unwrap();
    assert_pass(&check_scaling(&spec, 2, &Scalar::int(3), &EngineConfig::default()).unwrap());
}

#[test]
fn sheet_sums() {
    for name in ["airy", "eisenstein"] {
        let e = engine(name);
        for h in 0..=2 {
            assert_pass(&check_sheet_sum(&e, h).unwrap());
        }
        assert_pass(&check_sheet_sum_barred(&e, 1, 2, 7).unwrap());
    }
}

#[test]
fn symmetry_and_rauch() {
    for name in ["airy", "eisenstein", "eisenstein_shifted"] {
        let e = engine(name);
        assert_pass(&check_symmetry(&e, 0, 4, 3, 2).unwrap());
        assert_pass(&check_symmetry(&e, 1, 2, 3, 2).unwrap());
        assert_pass(&check_rauch(&e, 5, 2).unwrap());
    }
}

#[test]
fn dilaton_and_commutation() {
    for name in ["airy", "eisenstein"] {
        let e = engine(name);
        assert_pass(&check_dilaton(&e, 1, 1, 11).unwrap());
        assert_pass(&check_dilaton(&e, 0, 3, 11).unwrap());
        assert_pass(&check_h_w30(&e).unwrap());
        assert_pass(&check_commutation(&e, 1, 1, 13).unwrap());
        assert!(check_dilaton(&e, 0, 1, 11).unwrap().skipped);
    }
}

#[test]
fn loop_residuals() {
    for name in ["airy", "eisenstein"] {
        let e = engine(name);
        for r in check_loop(&e, 1).unwrap() {
            assert_pass(&r);
        }
    }
    let l = loop_residual(&engine("eisenstein"), 1).unwrap();
    assert!(l.r_invariant && l.d_invariant && l.r_poles_allowed && l.d_poles_allowed);
}

#[test]
fn double_branch_point_contribution() {
    for name in ["eisenstein", "eisenstein_scaled", "eisenstein_shifted"] {
        let reports = check_double_bp(&curve(name)).unwrap();
        assert_eq!(reports.len(), 1);
        assert_pass(&reports[0]);
    }
    let airy = check_double_bp(&curve("airy")).unwrap();
    assert!(airy.len() == 1 && airy[0].skipped);
}

#[test]
fn theta_free_low_degree() {
    let e = engine("eisenstein");
    for r in check_theta_free(&e, 4, 1, 2).unwrap() {
        assert_pass(&r);
    }
    assert_eq!(graded_keys(4), vec![(0, 3), (0, 4), (1, 1), (1, 2)]);
}

#[test]
fn basepoint_and_truncation() {
    let keys = [(1, 1), (0, 3)];
    for name in ["airy", "eisenstein"] {
        let spec = CurveSpec::from_path(path(name)).unwrap();
        for r in check_basepoint(&spec, &s(-3, 2), &keys, 2).unwrap() {
            assert_pass(&r);
        }
        for r in check_truncation(&curve(name), &keys, 2).unwrap() {
            assert_pass(&r);
        }
    }
}

#[test]
fn residue_commutation_lemma() {
    assert_pass(&check_residue_commutation(&curve("airy"), 0, &s(5, 2)).unwrap());
    assert_pass(&check_residue_commutation(&curve("eisenstein"), 0, &s(5, 2)).unwrap());
}

#[test]
fn sample_points_are_generic_and_reproducible() {
    let c = curve("eisenstein");
    let a = sample_points(&c, 42, 6);
    assert_eq!(a, sample_points(&c, 42, 6));
    let x: Vec<Scalar> = a.iter().map(|p| c.x().eval(p).unwrap()).collect();
    for i in 0..x.len() {
        assert!(!a[i].is_zero() && a[i] != *c.basepoint());
        for j in 0..i {
            assert_ne!(x[i], x[j]);
        }
    }
}

#[test]
fn diagonal_restriction() {
    // w_3^(0) = 1/(2 p0² p1² p2²) on Airy, so its diagonal is 1/(2z⁶)
    let e = engine("airy");
    let w = e.correlator(&CorrelatorKey::symbolic(0, 3)).unwrap();
    assert_eq!(diagonal(&w.tensor), Rf::laurent_monomial(s(1, 2), -6));
}
