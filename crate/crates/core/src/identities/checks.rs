//! Identity checks on computed correlators. Each check returns a
//! [`CheckReport`] carrying the exact mismatch when it fails.

use itertools::Itertools;
use serde::Serialize;

use crate::algebra::{Field, Ring, Scalar, Series};
use crate::curve::{roots::roots_in_field, CurveSpec, DeckMap, Rf, SpectralCurve};
use crate::error::{Error, Result};
use crate::kernels::{self, pullback, Rf2, SeriesPoint};
use crate::recursion::{CorrelatorKey, Engine, EngineConfig, Slot};

use super::hop::{free_energy, h_apply, h_apply_rational, h_apply_tensor, h_moduli};
use super::{diagonal, sample_points, value_at};

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
    /// lhs − rhs when the check fails.
    pub mismatch: Option<String>,
}

impl CheckReport {
    pub fn verdict(suite: &str, name: String, passed: bool, detail: String, mismatch: Option<String>) -> Self {
        CheckReport { suite: suite.into(), name, passed, skipped: false, detail, mismatch }
    }

    pub fn skip(suite: &str, name: String, why: &str) -> Self {
        CheckReport { suite: suite.into(), name, passed: true, skipped: true, detail: why.into(), mismatch: None }
    }

    fn rational(suite: &str, name: String, lhs: &Rf, rhs: &Rf) -> Self {
        let diff = lhs.minus(rhs);
        let passed = diff.is_zero();
        let detail = format!("lhs = {}, rhs = {}", lhs.render("q"), rhs.render("q"));
        CheckReport::verdict(suite, name, passed, detail, (!passed).then(|| diff.render("q")))
    }

    fn scalar(suite: &str, name: String, lhs: &Scalar, rhs: &Scalar) -> Self {
        let diff = lhs.minus(rhs);
        let passed = diff.is_zero();
        let detail = format!("lhs = {lhs}, rhs = {rhs}");
        CheckReport::verdict(suite, name, passed, detail, (!passed).then(|| diff.to_string()))
    }
}

/// Σ_i w_1^(h)(σ_i(q)) = 0 as a rational identity in q.
pub fn check_sheet_sum(engine: &Engine, h: usize) -> Result<CheckReport> {
    let w = engine.rational(h, &[])?;
    let total = engine.curve().fiber_symbolic().iter().fold(Rf::zero(), |acc, s| acc.plus(&pullback(&w, s)));
    Ok(CheckReport::rational("sheet-sum", format!("sum_i w_1^({h})(sigma_i q)"), &total, &Rf::zero()))
}

/// w̄_{n+1}^(h)(σ_k(q), P) = −Σ_{j≠k} w_{n+1}^(h)(σ_j(q), P) for every sheet k.
pub fn check_sheet_sum_barred(engine: &Engine, h: usize, n: usize, seed: u64) -> Result<CheckReport> {
    let curve = engine.curve();
    let name = format!("barred sheet sum w_{}^({h})", n + 1);
    if !curve.sheets_complete() {
        return Ok(CheckReport::skip("sheet-sum", name, "sheet list is incomplete"));
    }
    let pts = sample_points(curve, seed, n);
    let sheets = curve.fiber_symbolic();
    let unbarred: Rf = if h == 0 && n == 1 {
        Rf::pole(Scalar::one(), &pts[0], 2)
    } else {
        engine.rational(h, &pts)?
    };
    let on_sheet: Vec<Rf> = sheets.iter().map(|s| pullback(&unbarred, s)).collect();
    let mut worst = Rf::zero();
    for k in 0..sheets.len() {
        let mut barred = on_sheet[k].clone();
        if h == 0 && n == 1 {
            // x(σ_k q) = x(q), so the shift is x'(q)x'(p)/(x(q) − x(p))² on every sheet
            let p = &pts[0];
            let diff = curve.x().minus(&Rf::constant(curve.x().eval(p)?));
            let term = curve.dx().mul_coeff(&curve.dx().eval(p)?).divide(&diff.times(&diff))?;
            barred = barred.minus(&term);
        }
        let others = (0..sheets.len()).filter(|&j| j != k).fold(Rf::zero(), |acc, j| acc.plus(&on_sheet[j]));
        let d = barred.plus(&others);
        if !d.is_zero() {
            worst = d;
        }
    }
    let passed = worst.is_zero();
    Ok(CheckReport::verdict(
        "sheet-sum",
        name,
        passed,
        format!("spectators {:?}", pts.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
        (!passed).then(|| worst.render("q")),
    ))
}

/// Slot-permutation symmetry of w_k^(h) at `tuples` random rational points.
pub fn check_symmetry(engine: &Engine, h: usize, k: usize, seed: u64, tuples: usize) -> Result<CheckReport> {
    let name = format!("w_{k}^({h}) permutation symmetry");
    for i in 0..tuples {
        let pts = sample_points(engine.curve(), seed.wrapping_add(i as u64), k);
        let base = value_at(engine, h, &pts)?;
        for perm in (0..k).permutations(k) {
            let permuted: Vec<Scalar> = perm.iter().map(|&j| pts[j].clone()).collect();
            let v = value_at(engine, h, &permuted)?;
            if v != base {
                return Ok(CheckReport::verdict(
                    "symmetry",
                    name,
                    false,
                    format!("points {:?} order {perm:?}", pts.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
                    Some(v.minus(&base).to_string()),
                ));
            }
        }
    }
    Ok(CheckReport::verdict("symmetry", name, true, format!("{tuples} tuples, {k}! orders each"), None))
}

fn h_on_first(engine: &Engine, h: usize, pts: &[Scalar]) -> Result<Rf> {
    let mut slots = vec![Slot::Sym, Slot::Sym];
    slots.extend(pts.iter().cloned().map(Slot::At));
    let w = engine.correlator(&CorrelatorKey::new(h, slots))?;
    h_apply_tensor(engine.curve(), &w.tensor, 0)?.to_rational(1)
}

/// H on the extra slot of w_{k+1}^(h) equals (2 − 2h − k)·w_k^(h).
pub fn check_dilaton(engine: &Engine, h: usize, k: usize, seed: u64) -> Result<CheckReport> {
    let chi = 2 - 2 * h as i64 - k as i64;
    let name = format!("H[w_{}^({h})(p, q, ...)] = {chi} w_{k}^({h})", k + 1);
    if chi > 0 || k == 0 {
        return Ok(CheckReport::skip("dilaton", name, "requires 2 - 2h - k <= 0 and k >= 1"));
    }
    let pts = sample_points(engine.curve(), seed, k - 1);
    let lhs = h_on_first(engine, h, &pts)?;
    let rhs = engine.rational(h, &pts)?.scale(&Scalar::int(chi));
    Ok(CheckReport::rational("dilaton", name, &lhs, &rhs))
}

/// H[B(·, q)] = −y(q)dx(q) with q symbolic.
pub fn check_h_bergman(curve: &SpectralCurve) -> Result<CheckReport> {
    let b = kernels::bergman_symbolic().payload;
    // B is symmetric, so reading its outer variable as p is harmless.
    let lhs = h_apply_rational(curve, &b, &[Rf::var()])?;
    let rhs = curve.ydx().negate();
    Ok(CheckReport::rational("dilaton", "H[B(p, q)] = -y(q)dx(q)".into(), &lhs, &rhs))
}

/// H[w_3^(0)(p, p1, p2)] = 0 with all slots symbolic.
pub fn check_h_w30(engine: &Engine) -> Result<CheckReport> {
    let w = engine.correlator(&CorrelatorKey::symbolic(0, 3))?;
    let r = h_apply_tensor(engine.curve(), &w.tensor, 0)?;
    Ok(CheckReport::verdict(
        "dilaton",
        "H[w_3^(0)] = 0".into(),
        r.is_empty(),
        format!("{} terms in w_3^(0)", w.tensor.len()),
        (!r.is_empty()).then(|| format!("{r:?}")),
    ))
}

/// H[w_{k+2}^(h)] − dx ∂/∂V H[w_{k+1}^(h)] = −w_{k+1}^(h), with ∂/∂V acting
/// as slot addition.
pub fn check_commutation(engine: &Engine, h: usize, k: usize, seed: u64) -> Result<CheckReport> {
    let name = format!("[H, dx d/dV] on w_{}^({h})", k + 1);
    if 1 - 2 * h as i64 - k as i64 >= 0 || k == 0 {
        return Ok(CheckReport::skip("commutation", name, "requires 1 - 2h - k < 0 and k >= 1"));
    }
    let curve = engine.curve();
    let mut attempt = 0;
    let (pts, wk) = loop {
        let pts = sample_points(curve, seed.wrapping_add(attempt), k);
        let wk = value_at(engine, h, &pts)?;
        if !wk.is_zero() {
            break (pts, wk);
        }
        attempt += 1;
        if attempt > 16 {
            return Ok(CheckReport::skip("commutation", name, "w_k vanishes at all sampled points"));
        }
    };
    let first = h_on_first(engine, h, &pts)?;
    let inner = h_apply(curve, &engine.correlator(&CorrelatorKey::with_points(h, &pts))?.tensor)?;
    let ratio = inner.divide(&wk).ok_or(Error::DivisionByZero)?;
    let w_next = engine.rational(h, &pts)?;
    let lhs = first.minus(&w_next.mul_coeff(&ratio));
    Ok(CheckReport::rational("commutation", name, &lhs, &w_next.negate()))
}

/// Moduli form of H against the residue form on w_1^(h).
pub fn check_hequiv(engine: &Engine, h: usize) -> Result<CheckReport> {
    let w = engine.correlator(&CorrelatorKey::symbolic(h, 1))?;
    let lhs = h_moduli(engine.curve(), &w.tensor)?;
    let rhs = h_apply(engine.curve(), &w.tensor)?;
    Ok(CheckReport::scalar("hequiv", format!("-sum t_a J_a(w_1^({h})) = H[w_1^({h})]"), &lhs, &rhs))
}

/// F^(h) for y ↦ λy equals λ^{2−2h}·F^(h).
pub fn check_scaling(spec: &CurveSpec, h: usize, lambda: &Scalar, config: &EngineConfig) -> Result<CheckReport> {
    let base = Engine::new(SpectralCurve::load(spec.clone())?, config.clone());
    let scaled = Engine::new(SpectralCurve::load(spec.with_scaled_y(lambda))?, config.clone());
    let f = free_energy(&base, h)?.value;
    let g = free_energy(&scaled, h)?.value;
    let rhs = f.times(&lambda.pow(2 - 2 * h as i64));
    Ok(CheckReport::scalar("hequiv", format!("F^({h})(lambda y) = lambda^{} F^({h})", 2 - 2 * h as i64), &g, &rhs))
}

/// −Res_{p→β} dS_{p,o}(q)·Σ_j B(p, ϑ^j p)/ω(p, ϑ^j p) at a double branch point β,
/// computed directly from series, against (1/9)·dq/(q − β)²/(y_{-2}·x_lead).
pub fn check_double_bp(curve: &SpectralCurve) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (i, b) in curve.branch_points().iter().enumerate() {
        if b.nb != 2 {
            continue;
        }
        let lhs = local_w11(curve, i, 16)?;
        let ym2 = b.y_minus2.clone().ok_or_else(|| Error::Contract("double branch point without y_-2".into()))?;
        let c = Scalar::int(9).times(&ym2).times(&b.x_lead).inverse().ok_or(Error::DivisionByZero)?;
        let rhs = Rf::pole(c, &b.location, 2);
        out.push(CheckReport::rational("double-bp", format!("1/9 identity at z = {}", b.location), &lhs, &rhs));
    }
    if out.is_empty() {
        out.push(CheckReport::skip("double-bp", "1/9 identity".into(), "curve has no double branch point"));
    }
    Ok(out)
}

/// Sum over e < 0 of −K_e·dq/(q − α)^{−e}: the q-dependence of −Res dS_{t,o}(q)·K(t),
/// dropping the o-term, which carries the residue of K only.
fn residue_against_ds(k: &Series<Scalar>, alpha: &Scalar) -> Result<Rf> {
    if k.prec() < 0 {
        return Err(Error::InsufficientOrder { needed: 0, known: k.prec() });
    }
    if !k.coeff(-1)?.is_zero() {
        return Err(Error::Contract("kernel has a residue".into()));
    }
    let mut acc = Rf::zero();
    for (e, c) in k.terms() {
        if e < 0 {
            acc = acc.minus(&Rf::pole(c.clone(), alpha, (-e) as u32));
        }
    }
    Ok(acc)
}

struct LocalData {
    alpha: Scalar,
    args: Vec<SeriesPoint>,
    omega_inv: Vec<Series<Scalar>>,
}

fn local_data(curve: &SpectralCurve, bp: usize, n: i64) -> Result<LocalData> {
    let b = &curve.branch_points()[bp];
    let alpha = b.location.clone();
    let mut args = vec![SeriesPoint::local(&alpha)];
    let mut omega_inv = Vec::new();
    for j in 1..=b.nb {
        let g = curve.deck_germ(bp, j, n + 4)?;
        args.push(SeriesPoint::new(Series::constant(alpha.clone()).plus(&g.series)));
        let w = kernels::omega_j(curve, bp, j, n + 8)?;
        let v = w.valuation().ok_or(Error::DivisionByZero)?;
        omega_inv.push(w.truncate(v + n).recip()?);
    }
    Ok(LocalData { alpha, args, omega_inv })
}

fn local_w11(curve: &SpectralCurve, bp: usize, n: i64) -> Result<Rf> {
    let d = local_data(curve, bp, n)?;
    let mut k = Series::exact_zero();
    for j in 1..d.args.len() {
        k = k.plus(&kernels::bergman_series(&d.args[0], &d.args[j], n)?.times(&d.omega_inv[j - 1]));
    }
    residue_against_ds(&k, &d.alpha)
}

/// w_3^(0)(q, p, r) from the engine against the double-Bergman residue
/// formula, both at random rational points.
pub fn check_rauch(engine: &Engine, seed: u64, tuples: usize) -> Result<CheckReport> {
    let curve = engine.curve();
    let n = 16;
    for i in 0..tuples {
        let pts = sample_points(curve, seed.wrapping_add(i as u64), 3);
        let (q, p, r) = (&pts[0], &pts[1], &pts[2]);
        let mut direct = Rf::zero();
        for bp in 0..curve.branch_points().len() {
            let d = local_data(curve, bp, n)?;
            let mut k = Series::exact_zero();
            for j in 1..d.args.len() {
                let t = &d.args[0];
                let tj = &d.args[j];
                let pair = kernels::bergman_series_point(t, r, n)?
                    .times(&kernels::bergman_series_point(tj, p, n)?)
                    .plus(&kernels::bergman_series_point(tj, r, n)?.times(&kernels::bergman_series_point(t, p, n)?));
                k = k.plus(&pair.times(&d.omega_inv[j - 1]));
            }
            direct = direct.plus(&residue_against_ds(&k, &d.alpha)?);
        }
        let lhs = direct.eval(q)?;
        let rhs = value_at(engine, 0, &pts)?;
        if lhs != rhs {
            return Ok(CheckReport::scalar("rauch", format!("w_3^(0) at {q}, {p}, {r}"), &lhs, &rhs));
        }
    }
    Ok(CheckReport::verdict("rauch", "w_3^(0) = double-Bergman residue formula".into(), true, format!("{tuples} tuples"), None))
}

/// Loop-equation residuals R^(h), D^(h) as functions of z, with verdicts on
/// their behaviour as functions of x.
#[derive(Clone, Debug, Serialize)]
pub struct LoopResidual {
    pub h: usize,
    pub r: String,
    pub d: String,
    pub r_invariant: bool,
    pub d_invariant: bool,
    /// Pole order at the double branch value (in x), None when there is no pole.
    pub r_pole_order: Option<i64>,
    pub d_pole_order: Option<i64>,
    pub r_poles_allowed: bool,
    pub d_poles_allowed: bool,
}

fn schwarzian(x: &Rf) -> Rf {
    let d1 = x.derivative();
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let a = d3.divide(&d1).expect("x non-constant");
    let b = d2.divide(&d1).expect("x non-constant");
    a.minus(&b.times(&b).scale(&Scalar::frac(3, 2)))
}

/// Diagonal of w̄_2^(g)(p, p).
fn w2bar_diag(engine: &Engine, g: usize) -> Result<Rf> {
    if g == 0 {
        return Ok(schwarzian(engine.curve().x()).scale(&Scalar::frac(-1, 6)));
    }
    Ok(diagonal(&engine.correlator(&CorrelatorKey::symbolic(g, 2))?.tensor))
}

fn pull_power(f: &Rf, s: &Rf, power: i64) -> Result<Rf> {
    Ok(f.compose(s).times(&s.derivative().pow(power)?))
}

/// Verdict for a function of z that should be a function of x with poles
/// over finite x only at double branch values, of order ≤ `bound`.
fn x_pole_verdict(curve: &SpectralCurve, f: &Rf, bound: i64) -> Result<(Option<i64>, bool)> {
    if f.is_zero() {
        return Ok((None, true));
    }
    let mut worst = None;
    let mut ok = true;
    for (c, _) in roots_in_field(f.den())? {
        if curve.x().valuation_at(&c) < 0 {
            continue;
        }
        let xc = curve.x().eval(&c)?;
        let e = curve.x().minus(&Rf::constant(xc.clone())).valuation_at(&c);
        let ord = -f.valuation_at(&c);
        let order = (ord + e - 1) / e;
        let at_double = curve.branch_points().iter().any(|b| b.nb == 2 && b.x_value == xc);
        if !at_double || order > bound || ord % e != 0 {
            ok = false;
        }
        worst = Some(worst.map_or(order, |w: i64| w.max(order)));
    }
    Ok((worst, ok))
}

pub fn loop_residual(engine: &Engine, h: usize) -> Result<LoopResidual> {
    if h == 0 {
        return Err(Error::Usage("loop residuals are defined for h >= 1".into()));
    }
    let curve = engine.curve();
    if !curve.sheets_complete() {
        return Err(Error::Validation("loop residuals need the complete list of sheets".into()));
    }
    let w1 = |m: usize| engine.rational(m, &[]);
    // W̄_2^(h)(p, p)
    let mut g2 = w2bar_diag(engine, h - 1)?;
    for m in 1..h {
        g2 = g2.plus(&w1(m)?.times(&w1(h - m)?));
    }
    // W̄_3^(h)(p, p, p)
    let mut g3 = Rf::zero();
    if h >= 2 {
        g3 = diagonal(&engine.correlator(&CorrelatorKey::symbolic(h - 2, 3))?.tensor);
        for m in 1..h {
            for n in 1..h - m {
                g3 = g3.plus(&w1(m)?.times(&w1(n)?).times(&w1(h - m - n)?));
            }
            g3 = g3.plus(&w1(m)?.times(&w2bar_diag(engine, h - m - 1)?).scale(&Scalar::int(3)));
        }
    }
    let wh = w1(h)?;
    let dx = curve.dx();
    let mut r_num = Rf::zero();
    let mut d_num = Rf::zero();
    for s in curve.fiber_symbolic() {
        let yi = curve.y().compose(s);
        let wi = pull_power(&wh, s, 1)?;
        let g2i = pull_power(&g2, s, 2)?;
        let g3i = pull_power(&g3, s, 3)?;
        r_num = r_num.minus(&yi.times(dx).times(&wi)).plus(&g2i.scale(&Scalar::frac(1, 2)));
        let ydx = yi.times(dx);
        d_num = d_num
            .plus(&ydx.times(&g2i))
            .minus(&g3i.scale(&Scalar::frac(1, 3)))
            .minus(&ydx.times(&ydx).times(&wi));
    }
    let r = r_num.divide(&dx.pow(2)?)?;
    let d = d_num.divide(&dx.pow(3)?)?;
    let invariant = |f: &Rf| curve.fiber_symbolic().iter().all(|s| f.compose(s) == *f);
    let (r_pole_order, r_ok) = x_pole_verdict(curve, &r, 1)?;
    let (d_pole_order, d_ok) = x_pole_verdict(curve, &d, 2)?;
    Ok(LoopResidual {
        h,
        r: r.render("z"),
        d: d.render("z"),
        r_invariant: invariant(&r),
        d_invariant: invariant(&d),
        r_pole_order,
        d_pole_order,
        r_poles_allowed: r_ok,
        d_poles_allowed: d_ok,
    })
}

pub fn check_loop(engine: &Engine, h: usize) -> Result<Vec<CheckReport>> {
    let l = loop_residual(engine, h)?;
    let r_pass = l.r_invariant && l.r_poles_allowed;
    let d_pass = l.d_invariant && l.d_poles_allowed;
    Ok(vec![
        CheckReport::verdict(
            "loop",
            format!("R^({h}) pole order <= 1 at the hard edge"),
            r_pass,
            format!("R = {}, invariant = {}, pole order = {:?}", l.r, l.r_invariant, l.r_pole_order),
            (!r_pass).then(|| l.r.clone()),
        ),
        CheckReport::verdict(
            "loop",
            format!("D^({h}) pole order <= 2 at the hard edge"),
            d_pass,
            format!("D = {}, invariant = {}, pole order = {:?}", l.d, l.d_invariant, l.d_pole_order),
            (!d_pass).then(|| l.d.clone()),
        ),
    ])
}

/// Pairs (h, k) with χ < 2 and 2h + k ≤ `bound`.
pub fn graded_keys(bound: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for h in 0..=bound / 2 {
        for k in 1..=bound - 2 * h {
            if 2 * h + k >= 3 {
                out.push((h, k));
            }
        }
    }
    out
}

/// w_k^(h) evaluated at `tuples` rational points has zero θ-coordinate.
pub fn check_theta_free_key(engine: &Engine, h: usize, k: usize, seed: u64, tuples: usize) -> Result<CheckReport> {
    let mut bad = None;
    for i in 0..tuples {
        let pts = sample_points(engine.curve(), seed.wrapping_add(i as u64), k);
        let v = value_at(engine, h, &pts)?;
        if !v.is_rational() {
            bad = Some(v);
            break;
        }
    }
    let passed = bad.is_none();
    Ok(CheckReport::verdict(
        "theta-free",
        format!("w_{k}^({h}) is rational at rational points"),
        passed,
        format!("{tuples} tuples"),
        bad.map(|v| v.to_string()),
    ))
}

/// Every correlator with 2h + k ≤ `bound` passes [`check_theta_free_key`].
pub fn check_theta_free(engine: &Engine, bound: usize, seed: u64, tuples: usize) -> Result<Vec<CheckReport>> {
    graded_keys(bound).into_iter().map(|(h, k)| check_theta_free_key(engine, h, k, seed, tuples)).collect()
}

fn compare_engines(a: &Engine, b: &Engine, keys: &[(usize, usize)], seed: u64, suite: &str, what: &str) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for &(h, k) in keys {
        let pts = sample_points(a.curve(), seed, k - 1);
        let ra = a.rational(h, &pts)?;
        let rb = b.rational(h, &pts)?;
        out.push(CheckReport::rational(suite, format!("w_{k}^({h}) {what}"), &ra, &rb));
    }
    Ok(out)
}

/// Correlators with two different basepoints agree.
pub fn check_basepoint(spec: &CurveSpec, other: &Scalar, keys: &[(usize, usize)], seed: u64) -> Result<Vec<CheckReport>> {
    let a = Engine::with_defaults(SpectralCurve::load(spec.clone())?);
    let b = Engine::with_defaults(SpectralCurve::load(spec.with_basepoint(other.clone()))?);
    compare_engines(&a, &b, keys, seed, "robustness", &format!("basepoint {} vs {other}", spec.basepoint))
}

/// Correlators at truncation N (adaptive) and 2N agree.
pub fn check_truncation(curve: &SpectralCurve, keys: &[(usize, usize)], seed: u64) -> Result<Vec<CheckReport>> {
    let a = Engine::with_defaults(curve.clone());
    let mut out = Vec::new();
    for &(h, k) in keys {
        let pts = sample_points(curve, seed, k - 1);
        let key = CorrelatorKey::with_points(h, &pts);
        let va = a.correlator(&key)?;
        let n = va.order.max(1);
        let b = Engine::new(curve.clone(), EngineConfig { initial_order: Some(2 * n), max_order: 4 * n });
        let vb = b.correlator(&key)?;
        out.push(CheckReport::rational(
            "robustness",
            format!("w_{k}^({h}) order {n} vs {}", 2 * n),
            &va.rational()?,
            &vb.rational()?,
        ));
    }
    Ok(out)
}

/// Res_t Res_u f = Res_u Res_t f − Res_t Σ_{k=0}^{n_b} Res_{u→ϑ^k(t)} f at a
/// branch point with exact deck maps, for
/// f = dS_{t,o}(q0)/ω(t, ϑt) · Σ_k B(ϑ^k t, u)·(ϑ^k)'(t) · (1/(u − α)² + 1/(u − α)³)du.
pub fn check_residue_commutation(curve: &SpectralCurve, bp: usize, q0: &Scalar) -> Result<CheckReport> {
    let b = &curve.branch_points()[bp];
    let name = format!("residue commutation at z = {} (n_b = {})", b.location, b.nb);
    let mut decks = vec![Rf::var()];
    for d in &b.deck {
        match d {
            DeckMap::Exact(s) => decks.push(s.clone()),
            DeckMap::Germ => return Ok(CheckReport::skip("commutation-lemma", name, "deck map is only a germ")),
        }
    }
    let alpha = &b.location;
    let o = curve.basepoint();
    // ω(t, ϑt) and dS_{t,o}(q0) as functions of t
    let omega = curve.y().minus(&curve.y().compose(&decks[1])).times(curve.dx());
    let ds = Rf::constant(q0.clone()).minus(&Rf::var()).recip()?.minus(&Rf::constant(q0.minus(o).inverse().ok_or(Error::DivisionByZero)?));
    let t_part = ds.divide(&omega)?;
    let u_part = Rf::pole(Scalar::one(), alpha, 2).plus(&Rf::pole(Scalar::one(), alpha, 3));
    let build = |embed_t: &dyn Fn(&Rf) -> Rf2, embed_u: &dyn Fn(&Rf) -> Rf2| -> Result<Rf2> {
        let mut sum = Rf2::zero();
        for s in &decks {
            let diff = embed_t(s).minus(&embed_u(&Rf::var()));
            sum = sum.plus(&diff.pow(-2)?.times(&embed_t(&s.derivative())));
        }
        Ok(sum.times(&embed_t(&t_part)).times(&embed_u(&u_part)))
    };
    let inner = |f: &Rf| Rf2::constant(f.clone());
    let outer = |f: &Rf| kernels::lift_outer(f);
    // outer variable u, inner t
    let f_u = build(&inner, &outer)?;
    // outer variable t, inner u
    let f_t = build(&outer, &inner)?;
    let a = Rf::constant(alpha.clone());
    let lhs = f_u.residue_at(&a)?.residue_at(alpha)?;
    let swapped = f_t.residue_at(&a)?.residue_at(alpha)?;
    let mut moving = Rf::zero();
    for s in &decks {
        moving = moving.plus(&f_u.residue_at(s)?);
    }
    let correction = moving.residue_at(alpha)?;
    let rhs = swapped.minus(&correction);
    let mut r = CheckReport::scalar("commutation-lemma", name, &lhs, &rhs);
    r.detail = format!("{}; Res_u Res_t = {swapped}, correction = {correction}", r.detail);
    Ok(r)
}
