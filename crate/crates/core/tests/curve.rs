use num_bigint::BigInt;
use num_rational::BigRational;
use toprec::algebra::{Point, Ring, Scalar, Series};
use toprec::curve::{roots_in_field, CurveSpec, DeckMap, Rf, SpectralCurve};
use toprec::Error;

fn curve(name: &str) -> SpectralCurve {
    SpectralCurve::from_path(format!("{}/../../curves/{name}.curve", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn spec_text(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../curves/{name}.curve", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn airy_has_one_simple_branch_point() {
    let c = curve("airy");
    assert_eq!(c.degree(), 2);
    assert!(c.sheets_complete());
    let bps = c.branch_points();
    assert_eq!(bps.len(), 1);
    assert_eq!(bps[0].location, Scalar::zero());
    assert_eq!(bps[0].nb, 1);
    assert_eq!(bps[0].x_value, Scalar::zero());
    assert!(matches!(bps[0].deck[0], DeckMap::Exact(_)));
}

#[test]
fn eisenstein_has_one_double_branch_point() {
    let c = curve("eisenstein");
    let bps = c.branch_points();
    assert_eq!(bps.len(), 1);
    assert_eq!(bps[0].nb, 2);
    assert_eq!(bps[0].y_minus2, Some(Scalar::one()));
    assert_eq!(bps[0].x_lead, Scalar::one());
    for j in 1..=2 {
        let g = c.deck_germ(0, j, 6).unwrap();
        assert_eq!(g.series, Series::monomial(Scalar::theta_pow(j as i64), 1));
    }
}

#[test]
fn shifted_eisenstein_branch_point_moves() {
    let c = curve("eisenstein_shifted");
    let bps = c.branch_points();
    assert_eq!(bps.len(), 1);
    assert_eq!(bps[0].location, Scalar::one());
    assert_eq!(bps[0].nb, 2);
}

#[test]
fn trace_free_failure_is_rejected() {
    let text = spec_text("eisenstein").replace("z^-2 + (1/2)*z", "z^-2 + z^3");
    match SpectralCurve::parse(&text) {
        Err(Error::Validation(m)) => assert!(m.contains("trace-free"), "{m}"),
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn triple_branch_point_is_unsupported() {
    let err = SpectralCurve::from_path(format!("{}/../../curves/quartic.curve", env!("CARGO_MANIFEST_DIR"))).unwrap_err();
    assert!(matches!(err, Error::UnsupportedBranching { order: 3, .. }), "{err:?}");
}

#[test]
fn wrong_sheet_map_is_named() {
    let err = SpectralCurve::from_path(format!("{}/../../curves/corrupted.curve", env!("CARGO_MANIFEST_DIR"))).unwrap_err();
    match err {
        Error::Validation(m) => assert!(m.contains("sheets[1]"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn basepoint_at_branch_point_is_rejected() {
    let text = spec_text("airy").replace("basepoint = \"1\"", "basepoint = \"0\"");
    assert!(matches!(SpectralCurve::parse(&text), Err(Error::Basepoint(_))));
    // −1 lies over the same x as 1, which is fine
    let text = spec_text("airy").replace("basepoint = \"1\"", "basepoint = \"-1\"");
    assert!(SpectralCurve::parse(&text).is_ok());
}

#[test]
fn theta_over_rationals_is_a_field_error() {
    let text = spec_text("airy").replace("y = \"z\"", "y = \"w*z\"");
    assert!(matches!(CurveSpec::parse(&text), Err(Error::Field(_))));
}

#[test]
fn parse_errors_carry_positions() {
    let text = "field = \"Q\"\nx = \"z^2\"\ny = \"z + + \"\nsheets = [\"z\", \"-z\"]\nbasepoint = \"1\"\n";
    match CurveSpec::parse(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let text = "field = \"Q\"\nx = \"z^2\"\n";
    assert!(matches!(CurveSpec::parse(text), Err(Error::Parse { .. })));
}

#[test]
fn canonical_form_round_trips() {
    for name in ["airy", "eisenstein", "eisenstein_shifted", "gaussian"] {
        let spec = CurveSpec::parse(&spec_text(name)).unwrap();
        let again = CurveSpec::parse(&spec.canonical()).unwrap();
        assert_eq!(spec, again, "{name}");
    }
}

#[test]
fn fibers_follow_declared_sheets() {
    let c = curve("eisenstein");
    let p = Scalar::int(2);
    let w = Scalar::theta();
    assert_eq!(c.fiber(&p).unwrap(), vec![p.clone(), w.times(&p), w.times(&w).times(&p)]);
    let x = c.x();
    for q in c.fiber(&p).unwrap() {
        assert_eq!(x.eval(&q).unwrap(), Scalar::int(8));
    }
}

#[test]
fn deck_maps_compose_as_a_cyclic_group() {
    let c = curve("eisenstein");
    let bp = &c.branch_points()[0];
    let maps: Vec<Rf> = bp
        .deck
        .iter()
        .map(|d| match d {
            DeckMap::Exact(s) => s.clone(),
            DeckMap::Germ => panic!("expected exact maps"),
        })
        .collect();
    // ϑ^j ∘ ϑ^k = ϑ^{j+k mod 3}
    let all = [Rf::var(), maps[0].clone(), maps[1].clone()];
    for j in 0..3 {
        for k in 0..3 {
            assert_eq!(all[j].compose(&all[k]), all[(j + k) % 3]);
        }
    }
}

#[test]
fn eisenstein_y_is_trace_free_at_sample_points() {
    let c = curve("eisenstein");
    for p in [2, 3, -5, 7, 11] {
        let p = Scalar::frac(p, 3);
        let total = c.fiber(&p).unwrap().iter().fold(Scalar::zero(), |acc, q| acc.plus(&c.y().eval(q).unwrap()));
        assert!(total.is_zero());
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Truncated product of coefficient vectors starting at s^0.
fn mul(a: &[BigRational], b: &[BigRational], n: usize) -> Vec<BigRational> {
    let mut out = vec![rat(0); n];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < n {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Solve x(ϑ(s)) = x(s) for x = s² + s³ one coefficient at a time.
fn deck_oracle(n: usize) -> Vec<BigRational> {
    let mut c = vec![rat(0); n + 1];
    c[1] = rat(-1);
    for k in 2..=n {
        let sq = mul(&c, &c, k + 2);
        let cube = mul(&sq, &c, k + 2);
        // coefficient of s^{k+1} in ϑ² + ϑ³ with c_k still zero; c_k enters through 2c₁c_k
        let target = if k + 1 == 3 { rat(1) } else { rat(0) };
        let known = &sq[k + 1] + &cube[k + 1];
        c[k] = (target - known) / (rat(2) * &c[1]);
    }
    c
}

#[test]
fn deck_germ_matches_fixed_point_oracle() {
    let text = "field = \"Q\"\nx = \"z^2 + z^3\"\ny = \"z\"\nsheets = [\"z\"]\nbasepoint = \"1\"\n";
    let c = SpectralCurve::parse(text).unwrap();
    let bp = c.branch_points().iter().position(|b| b.location.is_zero()).unwrap();
    assert!(matches!(c.branch_points()[bp].deck[0], DeckMap::Germ));
    let n = 8;
    let g = c.deck_germ(bp, 1, n as i64 + 1).unwrap();
    assert!(g.exact.is_none());
    let oracle = deck_oracle(n);
    for (k, expected) in oracle.iter().enumerate().skip(1) {
        assert_eq!(g.series.coeff(k as i64).unwrap(), Scalar::rational(expected.clone()), "coefficient {k}");
    }
    assert_eq!(g.series.coeff(2).unwrap(), Scalar::int(-1));
    assert_eq!(g.series.coeff(3).unwrap(), Scalar::int(-1));
    // recomposition: x(ϑ(s)) − x(s) vanishes through the known window
    let xs = c.x().expand_at(&Point::Finite(Scalar::zero()), n as i64 + 1).unwrap();
    let diff = xs.compose(&g.series).unwrap().minus(&xs);
    for k in 0..diff.prec().min(n as i64 + 1) {
        assert!(diff.coeff(k).unwrap().is_zero(), "x∘ϑ − x at s^{k}");
    }
}

#[test]
fn roots_are_found_with_multiplicity() {
    use toprec::algebra::Polynomial;
    // (z − 1)²(z² + z + 1) has roots 1 (twice), θ, θ²
    let p = Polynomial::new(vec![Scalar::int(1), Scalar::int(-1), Scalar::zero(), Scalar::int(-1), Scalar::int(1)]);
    let roots = roots_in_field(&p).unwrap();
    assert_eq!(roots.len(), 3);
    let w = Scalar::theta();
    assert!(roots.contains(&(Scalar::one(), 2)));
    assert!(roots.contains(&(w.clone(), 1)));
    assert!(roots.contains(&(w.times(&w), 1)));
}
